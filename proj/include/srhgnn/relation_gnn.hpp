#pragma once

// Relation-aware message passing over the sub-node graph.
//
// Layer l computes, for transformed inputs T_u (users) and T_v (sub-nodes),
//   E_u = PReLU(D_u^-1/2 T_u + Lambda   T_v)
//   E_v = PReLU(D_v^-1/2 T_v + Lambda^T T_u)
// where Lambda holds 1/sqrt(|J_m| |J_{n,k}|) on every edge. At layer 1
// T_u = x_u W_2 (+) H* W_3 and T_v = x_v W_1; deeper layers use E^{(l-1)}.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "srhgnn/autodiff.hpp"
#include "srhgnn/graph.hpp"
#include "srhgnn/rng.hpp"

namespace srhgnn::gnn {

struct RelationGnnConfig {
  std::size_t dim = 16;          // d, even when the social branch is on
  int layers = 2;                // L
  std::size_t social_dim = 128;  // d_H, width of H*
  bool use_social = true;
  double prelu_init = 0.25;

  /// Throws ConfigError on invalid combinations.
  void validate() const;
};

/// Constant sparse operators derived once from a SubNodeGraph.
struct PropagationOperators {
  CsrMatrix user_self;          // M x M, diag 1/sqrt|J_m| (1 when J_m is empty)
  CsrMatrix subnode_self;       // NK x NK
  CsrMatrix user_from_subnode;  // M x NK, decay coefficients
  CsrMatrix subnode_from_user;  // NK x M
  CsrMatrix item_pool;          // N x NK, 1/K per sub-node of the item
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  int num_relations = 1;

  static PropagationOperators build(const SubNodeGraph& graph);
};

struct RelationGnnParams {
  ad::Parameter user_embedding;     // x_u, M x d
  ad::Parameter subnode_embedding;  // x_v, NK x d
  std::vector<ad::Parameter> item_weights;  // W_1^{(l)}, d x d
  std::vector<ad::Parameter> user_weights;  // W_2^{(1)} d x d/2 (d x d without social), then d x d
  ad::Parameter social_weight;              // W_3, d_H x d/2 (empty without social)
  std::vector<ad::Parameter> slopes;        // one per layer

  static RelationGnnParams init(std::size_t num_users, std::size_t num_subnodes,
                                const RelationGnnConfig& config, Rng& rng);
  std::vector<ad::Parameter*> all();
};

struct LayerEmbeddings {
  ad::Var users;     // M x d
  ad::Var subnodes;  // NK x d
};

struct FinalEmbeddings {
  ad::Var users;     // M x L*d
  ad::Var subnodes;  // NK x L*d
  ad::Var items;     // N x L*d, mean over each item's K sub-nodes
};

/// One propagation layer. For layer == 1, `prev` holds the free embeddings
/// and `h_star` must be set when the social branch is on.
LayerEmbeddings propagate_layer(const PropagationOperators& ops,
                                const LayerEmbeddings& prev,
                                std::optional<ad::Var> h_star,
                                RelationGnnParams& params,
                                const RelationGnnConfig& config, int layer);

/// Row-wise concatenation of every layer in order.
LayerEmbeddings concat_layers(std::span<const LayerEmbeddings> layers);

ad::Var pool_item_subnodes(const PropagationOperators& ops, ad::Var subnodes);
/// Direct form: E_v[n] = (1/K) sum_k E_v_sub[n*K + k - 1].
Matrix pool_item_subnodes(const Matrix& subnodes, std::size_t num_items,
                          int num_relations);

/// Full L-layer forward pass.
FinalEmbeddings forward(ad::Tape& tape, const PropagationOperators& ops,
                        std::optional<ad::Var> h_star, RelationGnnParams& params,
                        const RelationGnnConfig& config,
                        std::vector<LayerEmbeddings>* layers_out = nullptr);

}  // namespace srhgnn::gnn
