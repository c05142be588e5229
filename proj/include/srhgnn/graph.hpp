#pragma once

// Input graphs: the undirected user social graph and the user / item
// sub-node bipartite graph obtained by splitting every item into one vertex
// per relation type.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "srhgnn/sparse.hpp"

namespace srhgnn {

using UserPair = std::pair<std::size_t, std::size_t>;

/// Undirected, self-loop free social graph over M users.
struct UserSocialGraph {
  std::size_t num_users = 0;
  /// Each undirected edge once, as (lo, hi) with lo < hi, sorted.
  std::vector<UserPair> edges;
  /// Binary symmetric M x M adjacency with zero diagonal.
  CsrMatrix adjacency;

  std::size_t degree(std::size_t m) const { return adjacency.row_nnz(m); }
  bool connected(std::size_t a, std::size_t b) const {
    return adjacency.contains(a, b);
  }
};

/// Symmetrizes, deduplicates and drops self pairs. Throws DataError naming
/// the first pair with an index >= num_users.
UserSocialGraph build_social_graph(std::span<const UserPair> edges,
                                   std::size_t num_users);

struct RatingTriple {
  std::size_t user;
  std::size_t item;
  double rating;
};

/// A user-item edge of relation type `relation` in {1..K}.
struct Interaction {
  std::size_t user;
  std::size_t item;
  int relation;
  double rating;

  bool operator==(const Interaction&) const = default;
};

class SubNodeGraph {
 public:
  SubNodeGraph() = default;

  /// Builds from already-typed interactions. Throws DataError on an index out
  /// of range, a relation outside {1..K}, or a repeated (user, item) pair.
  static SubNodeGraph from_interactions(std::vector<Interaction> interactions,
                                        std::size_t num_users,
                                        std::size_t num_items,
                                        int num_relations);

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  int num_relations() const { return num_relations_; }
  std::size_t num_subnodes() const {
    return num_items_ * static_cast<std::size_t>(num_relations_);
  }
  std::size_t num_vertices() const { return num_users_ + num_subnodes(); }

  /// Column of sub-node (item, relation) in A_r: item * K + (relation - 1).
  std::size_t subnode(std::size_t item, int relation) const {
    return item * static_cast<std::size_t>(num_relations_) +
           static_cast<std::size_t>(relation - 1);
  }
  std::size_t item_of(std::size_t subnode) const {
    return subnode / static_cast<std::size_t>(num_relations_);
  }
  int relation_of(std::size_t subnode) const {
    return static_cast<int>(subnode % static_cast<std::size_t>(num_relations_)) + 1;
  }

  const std::vector<Interaction>& interactions() const { return interactions_; }
  /// Binary M x (N*K) interaction matrix A_r.
  const CsrMatrix& adjacency() const { return adjacency_; }
  const CsrMatrix& adjacency_transposed() const { return adjacency_t_; }

  /// J_m: sub-node columns adjacent to user m, ascending.
  std::span<const std::size_t> user_neighbors(std::size_t m) const;
  /// J_{n,k}: users adjacent to a sub-node column, ascending.
  std::span<const std::size_t> subnode_neighbors(std::size_t subnode) const;

  std::size_t user_degree(std::size_t m) const { return adjacency_.row_nnz(m); }
  std::size_t subnode_degree(std::size_t s) const { return adjacency_t_.row_nnz(s); }

  bool has_edge(std::size_t m, std::size_t item, int relation) const;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  int num_relations_ = 1;
  std::vector<Interaction> interactions_;
  CsrMatrix adjacency_;
  CsrMatrix adjacency_t_;
};

/// Maps each rating to relation type k = rating. Non-integer ratings or
/// ratings outside {1..K} raise DataError, as does a repeated (user, item).
SubNodeGraph decompose_interactions(std::span<const RatingTriple> ratings,
                                    std::size_t num_users, std::size_t num_items,
                                    int num_relations);

/// Self-looped, symmetrically normalized adjacency D^-1/2 (A + I) D^-1/2.
struct NormalizedAdjacency {
  CsrMatrix matrix;
  /// Row sums of A + I.
  std::vector<double> degrees;
};

/// Throws DataError if the input is not square and symmetric.
NormalizedAdjacency normalize(const CsrMatrix& adjacency);

/// 1 / sqrt(|J_m| * |J_{n,k}|) for an existing edge; ContractError otherwise.
double decay_coefficient(const SubNodeGraph& graph, std::size_t user,
                         std::size_t item, int relation);

}  // namespace srhgnn
