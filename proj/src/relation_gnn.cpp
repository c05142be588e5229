#include "srhgnn/relation_gnn.hpp"

#include <cmath>
#include <string>

#include "srhgnn/errors.hpp"
#include "srhgnn/init.hpp"

namespace srhgnn::gnn {

void RelationGnnConfig::validate() const {
  if (layers < 1) throw ConfigError("relation GNN needs at least one layer");
  if (dim == 0) throw ConfigError("embedding width must be positive");
  if (use_social && dim % 2 != 0) {
    throw ConfigError("embedding width must be even when the social branch is on");
  }
  if (use_social && social_dim == 0) throw ConfigError("social width must be positive");
}

namespace {

double self_decay(std::size_t degree) {
  return degree == 0 ? 1.0 : 1.0 / std::sqrt(static_cast<double>(degree));
}

}  // namespace

PropagationOperators PropagationOperators::build(const SubNodeGraph& graph) {
  PropagationOperators ops;
  ops.num_users = graph.num_users();
  ops.num_items = graph.num_items();
  ops.num_relations = graph.num_relations();
  const std::size_t ns = graph.num_subnodes();

  std::vector<double> du(ops.num_users);
  for (std::size_t m = 0; m < ops.num_users; ++m) du[m] = self_decay(graph.user_degree(m));
  std::vector<double> dv(ns);
  for (std::size_t s = 0; s < ns; ++s) dv[s] = self_decay(graph.subnode_degree(s));
  ops.user_self = CsrMatrix::diagonal(du);
  ops.subnode_self = CsrMatrix::diagonal(dv);

  std::vector<Triplet> lambda;
  lambda.reserve(graph.adjacency().nnz());
  for (std::size_t m = 0; m < ops.num_users; ++m) {
    for (std::size_t s : graph.user_neighbors(m)) {
      lambda.push_back({m, s, 1.0 / std::sqrt(static_cast<double>(graph.user_degree(m)) *
                                              static_cast<double>(graph.subnode_degree(s)))});
    }
  }
  ops.user_from_subnode = CsrMatrix::from_triplets(ops.num_users, ns, std::move(lambda));
  ops.subnode_from_user = ops.user_from_subnode.transpose();

  std::vector<Triplet> pool;
  pool.reserve(ns);
  const double w = 1.0 / static_cast<double>(ops.num_relations);
  for (std::size_t s = 0; s < ns; ++s) pool.push_back({graph.item_of(s), s, w});
  ops.item_pool = CsrMatrix::from_triplets(ops.num_items, ns, std::move(pool));
  return ops;
}

RelationGnnParams RelationGnnParams::init(std::size_t num_users,
                                          std::size_t num_subnodes,
                                          const RelationGnnConfig& config, Rng& rng) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.dim);
  RelationGnnParams p;
  p.user_embedding = xavier_parameter("gnn.user_embedding",
                                      static_cast<Eigen::Index>(num_users), d, rng);
  p.subnode_embedding = xavier_parameter("gnn.subnode_embedding",
                                         static_cast<Eigen::Index>(num_subnodes), d, rng);
  for (int l = 1; l <= config.layers; ++l) {
    const std::string tag = std::to_string(l);
    p.item_weights.push_back(xavier_parameter("gnn.item_weight" + tag, d, d, rng));
    const Eigen::Index user_out = (l == 1 && config.use_social) ? d / 2 : d;
    p.user_weights.push_back(xavier_parameter("gnn.user_weight" + tag, d, user_out, rng));
    p.slopes.push_back(scalar_parameter("gnn.slope" + tag, config.prelu_init));
  }
  if (config.use_social) {
    p.social_weight = xavier_parameter(
        "gnn.social_weight", static_cast<Eigen::Index>(config.social_dim), d / 2, rng);
  } else {
    p.social_weight = ad::Parameter("gnn.social_weight", Matrix(0, 0));
  }
  return p;
}

std::vector<ad::Parameter*> RelationGnnParams::all() {
  std::vector<ad::Parameter*> out{&user_embedding, &subnode_embedding};
  for (std::size_t l = 0; l < slopes.size(); ++l) {
    out.push_back(&item_weights[l]);
    out.push_back(&user_weights[l]);
    out.push_back(&slopes[l]);
  }
  if (social_weight.size() > 0) out.push_back(&social_weight);
  return out;
}

LayerEmbeddings propagate_layer(const PropagationOperators& ops,
                                const LayerEmbeddings& prev,
                                std::optional<ad::Var> h_star,
                                RelationGnnParams& params,
                                const RelationGnnConfig& config, int layer) {
  if (layer < 1 || layer > config.layers) {
    throw ContractError("propagate_layer: layer " + std::to_string(layer) +
                        " outside 1.." + std::to_string(config.layers));
  }
  ad::Tape& tape = prev.users.tape();
  const auto idx = static_cast<std::size_t>(layer - 1);
  ad::Var user_t = ad::matmul(prev.users, tape.parameter(params.user_weights[idx]));
  if (layer == 1 && config.use_social) {
    if (!h_star) throw ConfigError("social branch enabled but H* was not supplied");
    if (static_cast<std::size_t>(h_star->rows()) != ops.num_users ||
        static_cast<std::size_t>(h_star->cols()) != config.social_dim) {
      throw ConfigError("H* shape does not match users x social width");
    }
    user_t = ad::concat_cols(user_t, ad::matmul(*h_star, tape.parameter(params.social_weight)));
  }
  ad::Var item_t = ad::matmul(prev.subnodes, tape.parameter(params.item_weights[idx]));
  ad::Var slope = tape.parameter(params.slopes[idx]);
  LayerEmbeddings out;
  out.users = ad::prelu(ad::add(ad::spmm(ops.user_self, user_t),
                                ad::spmm(ops.user_from_subnode, item_t)),
                        slope);
  out.subnodes = ad::prelu(ad::add(ad::spmm(ops.subnode_self, item_t),
                                   ad::spmm(ops.subnode_from_user, user_t)),
                           slope);
  return out;
}

LayerEmbeddings concat_layers(std::span<const LayerEmbeddings> layers) {
  if (layers.empty()) throw ContractError("concat_layers: no layers");
  const Eigen::Index width = layers.front().users.cols();
  std::vector<ad::Var> users;
  std::vector<ad::Var> subnodes;
  for (const auto& l : layers) {
    if (l.users.cols() != width || l.subnodes.cols() != width) {
      throw ContractError("concat_layers: ragged layer widths");
    }
    users.push_back(l.users);
    subnodes.push_back(l.subnodes);
  }
  if (layers.size() == 1) return layers.front();
  return {ad::concat_cols(users), ad::concat_cols(subnodes)};
}

ad::Var pool_item_subnodes(const PropagationOperators& ops, ad::Var subnodes) {
  return ad::spmm(ops.item_pool, subnodes);
}

Matrix pool_item_subnodes(const Matrix& subnodes, std::size_t num_items,
                          int num_relations) {
  const auto k = static_cast<Eigen::Index>(num_relations);
  if (subnodes.rows() != static_cast<Eigen::Index>(num_items) * k) {
    throw ContractError("pool_item_subnodes: expected N*K rows");
  }
  Matrix out(static_cast<Eigen::Index>(num_items), subnodes.cols());
  for (Eigen::Index n = 0; n < out.rows(); ++n) {
    out.row(n) = subnodes.middleRows(n * k, k).colwise().sum() / static_cast<double>(k);
  }
  return out;
}

FinalEmbeddings forward(ad::Tape& tape, const PropagationOperators& ops,
                        std::optional<ad::Var> h_star, RelationGnnParams& params,
                        const RelationGnnConfig& config,
                        std::vector<LayerEmbeddings>* layers_out) {
  config.validate();
  LayerEmbeddings state{tape.parameter(params.user_embedding),
                        tape.parameter(params.subnode_embedding)};
  std::vector<LayerEmbeddings> layers;
  for (int l = 1; l <= config.layers; ++l) {
    state = propagate_layer(ops, state, h_star, params, config, l);
    layers.push_back(state);
  }
  const LayerEmbeddings cat = concat_layers(layers);
  if (layers_out != nullptr) *layers_out = layers;
  return {cat.users, cat.subnodes, pool_item_subnodes(ops, cat.subnodes)};
}

}  // namespace srhgnn::gnn
