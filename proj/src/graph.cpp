#include "srhgnn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "srhgnn/errors.hpp"

namespace srhgnn {

UserSocialGraph build_social_graph(std::span<const UserPair> edges,
                                   std::size_t num_users) {
  std::set<UserPair> unique;
  for (const auto& [a, b] : edges) {
    if (a >= num_users || b >= num_users) {
      throw DataError("social edge (" + std::to_string(a) + ", " +
                      std::to_string(b) + ") out of range for " +
                      std::to_string(num_users) + " users");
    }
    if (a == b) continue;
    unique.emplace(std::min(a, b), std::max(a, b));
  }
  UserSocialGraph g;
  g.num_users = num_users;
  g.edges.assign(unique.begin(), unique.end());
  std::vector<Triplet> t;
  t.reserve(2 * g.edges.size());
  for (const auto& [a, b] : g.edges) {
    t.push_back({a, b, 1.0});
    t.push_back({b, a, 1.0});
  }
  g.adjacency = CsrMatrix::from_triplets(num_users, num_users, std::move(t));
  return g;
}

SubNodeGraph SubNodeGraph::from_interactions(std::vector<Interaction> interactions,
                                             std::size_t num_users,
                                             std::size_t num_items,
                                             int num_relations) {
  if (num_relations < 1) throw DataError("relation type count must be >= 1");
  SubNodeGraph g;
  g.num_users_ = num_users;
  g.num_items_ = num_items;
  g.num_relations_ = num_relations;

  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<Triplet> t;
  t.reserve(interactions.size());
  for (const Interaction& x : interactions) {
    if (x.user >= num_users || x.item >= num_items) {
      throw DataError("interaction (" + std::to_string(x.user) + ", " +
                      std::to_string(x.item) + ") out of range");
    }
    if (x.relation < 1 || x.relation > num_relations) {
      throw DataError("relation type " + std::to_string(x.relation) +
                      " outside 1.." + std::to_string(num_relations));
    }
    if (!seen.emplace(x.user, x.item).second) {
      throw DataError("duplicate interaction for user " + std::to_string(x.user) +
                      ", item " + std::to_string(x.item));
    }
    t.push_back({x.user, g.subnode(x.item, x.relation), 1.0});
  }
  g.interactions_ = std::move(interactions);
  g.adjacency_ = CsrMatrix::from_triplets(num_users, g.num_subnodes(), std::move(t));
  g.adjacency_t_ = g.adjacency_.transpose();
  return g;
}

std::span<const std::size_t> SubNodeGraph::user_neighbors(std::size_t m) const {
  const auto& ptr = adjacency_.row_ptr();
  return {adjacency_.col_idx().data() + ptr[m], ptr[m + 1] - ptr[m]};
}

std::span<const std::size_t> SubNodeGraph::subnode_neighbors(std::size_t s) const {
  const auto& ptr = adjacency_t_.row_ptr();
  return {adjacency_t_.col_idx().data() + ptr[s], ptr[s + 1] - ptr[s]};
}

bool SubNodeGraph::has_edge(std::size_t m, std::size_t item, int relation) const {
  if (m >= num_users_ || item >= num_items_ || relation < 1 ||
      relation > num_relations_) {
    return false;
  }
  return adjacency_.contains(m, subnode(item, relation));
}

SubNodeGraph decompose_interactions(std::span<const RatingTriple> ratings,
                                    std::size_t num_users, std::size_t num_items,
                                    int num_relations) {
  std::vector<Interaction> typed;
  typed.reserve(ratings.size());
  for (const RatingTriple& r : ratings) {
    const double k = std::round(r.rating);
    if (k != r.rating || k < 1.0 || k > static_cast<double>(num_relations)) {
      throw DataError("rating " + std::to_string(r.rating) +
                      " does not map to a relation type in 1.." +
                      std::to_string(num_relations));
    }
    typed.push_back({r.user, r.item, static_cast<int>(k), r.rating});
  }
  return SubNodeGraph::from_interactions(std::move(typed), num_users, num_items,
                                         num_relations);
}

NormalizedAdjacency normalize(const CsrMatrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw DataError("normalize: adjacency is not square");
  }
  if (!adjacency.is_symmetric()) {
    throw DataError("normalize: adjacency is not symmetric");
  }
  const std::size_t n = adjacency.rows();
  NormalizedAdjacency out;
  out.degrees.assign(n, 1.0);
  std::vector<Triplet> t;
  t.reserve(adjacency.nnz() + n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t p = adjacency.row_ptr()[r]; p < adjacency.row_ptr()[r + 1]; ++p) {
      out.degrees[r] += adjacency.values()[p];
      t.push_back({r, adjacency.col_idx()[p], adjacency.values()[p]});
    }
    t.push_back({r, r, 1.0});
  }
  CsrMatrix hat = CsrMatrix::from_triplets(n, n, std::move(t));
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(out.degrees[i]);
  std::vector<Triplet> scaled;
  scaled.reserve(hat.nnz());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t p = hat.row_ptr()[r]; p < hat.row_ptr()[r + 1]; ++p) {
      const std::size_t c = hat.col_idx()[p];
      scaled.push_back({r, c, hat.values()[p] * inv_sqrt[r] * inv_sqrt[c]});
    }
  }
  out.matrix = CsrMatrix::from_triplets(n, n, std::move(scaled));
  return out;
}

double decay_coefficient(const SubNodeGraph& graph, std::size_t user,
                         std::size_t item, int relation) {
  if (!graph.has_edge(user, item, relation)) {
    throw ContractError("decay coefficient queried for non-edge (" +
                        std::to_string(user) + ", " + std::to_string(item) +
                        ", k=" + std::to_string(relation) + ")");
  }
  const auto s = graph.subnode(item, relation);
  return 1.0 / std::sqrt(static_cast<double>(graph.user_degree(user)) *
                         static_cast<double>(graph.subnode_degree(s)));
}

}  // namespace srhgnn
