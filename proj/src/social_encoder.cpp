#include "srhgnn/social_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "srhgnn/adam.hpp"
#include "srhgnn/errors.hpp"
#include "srhgnn/init.hpp"

namespace srhgnn::social {

SocialEncoderParams SocialEncoderParams::init(std::size_t num_users,
                                              const SocialEncoderConfig& config,
                                              Rng& rng) {
  if (config.layers < 1 || config.layers > 3) {
    throw ConfigError("social encoder depth must be 1..3, got " +
                      std::to_string(config.layers));
  }
  if (config.hidden == 0) throw ConfigError("social hidden width must be positive");
  const auto m = static_cast<Eigen::Index>(num_users);
  const auto h = static_cast<Eigen::Index>(config.hidden);
  SocialEncoderParams p;
  p.embedding = xavier_parameter("social.embedding", m, h, rng);
  for (int l = 2; l <= config.layers; ++l) {
    p.weights.push_back(xavier_parameter("social.weight" + std::to_string(l), h, h, rng));
  }
  for (int l = 1; l <= config.layers; ++l) {
    p.slopes.push_back(scalar_parameter("social.slope" + std::to_string(l), config.prelu_init));
  }
  p.discriminator = xavier_parameter("social.discriminator", h, h, rng);
  return p;
}

std::vector<ad::Parameter*> SocialEncoderParams::encoder_parameters() {
  std::vector<ad::Parameter*> out{&embedding};
  for (auto& w : weights) out.push_back(&w);
  for (auto& s : slopes) out.push_back(&s);
  return out;
}

std::vector<ad::Parameter*> SocialEncoderParams::all() {
  auto out = encoder_parameters();
  out.push_back(&discriminator);
  return out;
}

std::vector<std::size_t> corruption_permutation(std::size_t num_users,
                                                std::uint64_t seed) {
  Rng rng(seed);
  return rng.permutation(num_users);
}

CorruptionSample corrupt(const Matrix& features, std::uint64_t seed) {
  if (features.rows() < 1) throw DataError("corrupt: no feature rows");
  CorruptionSample out;
  out.seed = seed;
  out.permutation = corruption_permutation(static_cast<std::size_t>(features.rows()), seed);
  out.rows.resize(features.rows(), features.cols());
  bool identity = true;
  for (std::size_t i = 0; i < out.permutation.size(); ++i) {
    out.rows.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(out.permutation[i]));
    identity = identity && out.permutation[i] == i;
  }
  out.informative = !identity;
  return out;
}

ad::Var encode_projected(const NormalizedAdjacency& s, ad::Var projected,
                         std::span<const ad::Var> weights,
                         std::span<const ad::Var> slopes) {
  if (static_cast<std::size_t>(projected.rows()) != s.matrix.rows()) {
    throw ContractError("social encoder: " + std::to_string(projected.rows()) +
                        " feature rows for " + std::to_string(s.matrix.rows()) +
                        " users");
  }
  if (weights.size() + 1 != slopes.size()) {
    throw ContractError("social encoder: layer count mismatch");
  }
  ad::Var h = ad::prelu(ad::spmm(s.matrix, projected), slopes[0]);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = ad::prelu(ad::spmm(s.matrix, ad::matmul(h, weights[l])), slopes[l + 1]);
  }
  return h;
}

namespace {

struct BoundEncoder {
  std::vector<ad::Var> weights;
  std::vector<ad::Var> slopes;
};

BoundEncoder bind(ad::Tape& tape, SocialEncoderParams& params) {
  BoundEncoder b;
  for (auto& w : params.weights) b.weights.push_back(tape.parameter(w));
  for (auto& s : params.slopes) b.slopes.push_back(tape.parameter(s));
  return b;
}

}  // namespace

ad::Var encode_patches(ad::Tape& tape, const NormalizedAdjacency& s,
                       ad::Var features, SocialEncoderParams& params) {
  if (features.cols() != params.embedding.rows()) {
    throw ContractError("social encoder: feature width " +
                        std::to_string(features.cols()) + " vs embedding rows " +
                        std::to_string(params.embedding.rows()));
  }
  const BoundEncoder b = bind(tape, params);
  ad::Var projected = ad::matmul(features, tape.parameter(params.embedding));
  return encode_projected(s, projected, b.weights, b.slopes);
}

ad::Var encode_one_hot(ad::Tape& tape, const NormalizedAdjacency& s,
                       std::span<const std::size_t> feature_rows,
                       SocialEncoderParams& params) {
  const BoundEncoder b = bind(tape, params);
  ad::Var projected = ad::gather_rows(tape.parameter(params.embedding), feature_rows);
  return encode_projected(s, projected, b.weights, b.slopes);
}

ad::Var readout(const NormalizedAdjacency& s, ad::Var patches) {
  const std::size_t m = s.degrees.size();
  if (m == 0) throw DataError("readout of an empty graph");
  const double total = std::accumulate(s.degrees.begin(), s.degrees.end(), 0.0);
  Matrix weights(1, static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    weights(0, static_cast<Eigen::Index>(i)) = s.degrees[i] / total;
  }
  ad::Var w = patches.tape().constant(std::move(weights));
  return ad::sigmoid(ad::matmul(w, patches));
}

ad::Var discriminator_logits(ad::Var patches, ad::Var summary, ad::Var w6) {
  return ad::matmul(patches, ad::matmul(w6, ad::transpose(summary)));
}

ad::Var mi_loss(ad::Var positive_logits, ad::Var negative_logits) {
  const double count =
      static_cast<double>(positive_logits.value().size() + negative_logits.value().size());
  ad::Var pos = ad::sum(ad::log_sigmoid(positive_logits));
  ad::Var neg = ad::sum(ad::log_sigmoid(ad::scale(negative_logits, -1.0)));
  return ad::scale(ad::add(pos, neg), -1.0 / count);
}

Matrix readout(const Matrix& patches, const NormalizedAdjacency& s) {
  const std::size_t m = s.degrees.size();
  if (m == 0) throw DataError("readout of an empty graph");
  if (static_cast<std::size_t>(patches.rows()) != m) {
    throw ContractError("readout: patch rows do not match graph size");
  }
  double total = 0.0;
  Matrix numerator = Matrix::Zero(1, patches.cols());
  for (std::size_t i = 0; i < m; ++i) {
    numerator += s.degrees[i] * patches.row(static_cast<Eigen::Index>(i));
    total += s.degrees[i];
  }
  return (numerator / total).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

double discriminate(const Matrix& h, const Matrix& summary, const Matrix& w6) {
  const Eigen::Map<const Eigen::VectorXd> hv(h.data(), h.size());
  const Eigen::Map<const Eigen::VectorXd> rv(summary.data(), summary.size());
  if (w6.rows() != hv.size() || w6.cols() != rv.size()) {
    throw ContractError("discriminate: shape mismatch");
  }
  const double logit = hv.dot(w6 * rv);
  return 1.0 / (1.0 + std::exp(-logit));
}

double mi_loss(std::span<const double> positive, std::span<const double> negative) {
  if (positive.empty() || negative.empty()) {
    throw ContractError("mi_loss needs at least one positive and one negative");
  }
  static constexpr double kClamp = 1e-12;
  auto clamp = [](double p) {
    const double c = std::clamp(p, kClamp, 1.0 - kClamp);
    if (c != p) spdlog::debug("mi_loss: clamped probability {}", p);
    return c;
  };
  double total = 0.0;
  for (double p : positive) total += std::log(clamp(p));
  for (double p : negative) total += std::log(1.0 - clamp(p));
  return -total / static_cast<double>(positive.size() + negative.size());
}

PretrainResult pretrain(const UserSocialGraph& graph, const PretrainConfig& config) {
  if (config.epochs < 1) throw ConfigError("pretrain epochs must be >= 1");
  if (graph.num_users == 0) throw DataError("pretrain: empty social graph");
  const NormalizedAdjacency s = normalize(graph.adjacency);
  Rng init_rng = Rng::stream(config.seed, "social-init");
  PretrainResult result;
  result.params = SocialEncoderParams::init(graph.num_users, config.encoder, init_rng);
  result.seed = config.seed;
  result.epochs = config.epochs;

  std::vector<std::size_t> identity(graph.num_users);
  std::iota(identity.begin(), identity.end(), std::size_t{0});

  const auto params = result.params.all();
  Adam adam(params, AdamOptions{.learning_rate = config.learning_rate});
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto perm = corruption_permutation(
        graph.num_users, mix_seed(config.seed, "social-corrupt", static_cast<std::uint64_t>(epoch)));
    adam.zero_grad();
    ad::Tape tape;
    try {
      ad::Var h = encode_one_hot(tape, s, identity, result.params);
      ad::Var summary = readout(s, h);
      ad::Var corrupted = encode_one_hot(tape, s, perm, result.params);
      ad::Var w6 = tape.parameter(result.params.discriminator);
      ad::Var loss = mi_loss(discriminator_logits(h, summary, w6),
                             discriminator_logits(corrupted, summary, w6));
      result.losses.push_back(loss.scalar());
      tape.backward(loss);
    } catch (const NumericalError& e) {
      throw NumericalError("social pretraining diverged at epoch " +
                           std::to_string(epoch) + ": " + e.what());
    }
    adam.step();
  }

  ad::Tape tape;
  result.h_star = encode_one_hot(tape, s, identity, result.params).value();
  return result;
}

double discriminator_accuracy(const UserSocialGraph& graph,
                              SocialEncoderParams& params, std::uint64_t seed,
                              int trials) {
  const NormalizedAdjacency s = normalize(graph.adjacency);
  std::vector<std::size_t> identity(graph.num_users);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  ad::Tape tape;
  ad::Var h = encode_one_hot(tape, s, identity, params);
  ad::Var summary = readout(s, h);
  ad::Var w6 = tape.parameter(params.discriminator);
  const Matrix pos = discriminator_logits(h, summary, w6).value();
  std::size_t correct = 0;
  std::size_t total = 0;
  for (int t = 0; t < trials; ++t) {
    const auto perm = corruption_permutation(
        graph.num_users, mix_seed(seed, "heldout-corrupt", static_cast<std::uint64_t>(t)));
    const Matrix neg =
        discriminator_logits(encode_one_hot(tape, s, perm, params), summary, w6).value();
    for (Eigen::Index i = 0; i < pos.rows(); ++i) {
      correct += pos(i, 0) > 0.0 ? 1 : 0;
      correct += neg(i, 0) < 0.0 ? 1 : 0;
      total += 2;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace srhgnn::social
