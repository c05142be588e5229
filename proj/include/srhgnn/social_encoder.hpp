#pragma once

// Social dependency encoder: graph-convolutional patch embeddings over the
// user social graph, a degree-weighted sigmoid readout, and a bilinear
// discriminator trained by mutual-information maximization against
// node-shuffled corruptions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "srhgnn/autodiff.hpp"
#include "srhgnn/graph.hpp"
#include "srhgnn/rng.hpp"

namespace srhgnn::social {

struct SocialEncoderConfig {
  std::size_t hidden = 128;  // d_H
  int layers = 1;            // 1..3
  double prelu_init = 0.25;
};

struct PretrainConfig {
  SocialEncoderConfig encoder;
  int epochs = 200;  // E_1
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

/// Encoder parameters. Inputs are one-hot user identities, so the first
/// layer's weight is an M x d_H embedding table.
struct SocialEncoderParams {
  ad::Parameter embedding;
  std::vector<ad::Parameter> weights;  // layers 2..L, d_H x d_H
  std::vector<ad::Parameter> slopes;   // one PReLU slope per layer
  ad::Parameter discriminator;         // W_6, d_H x d_H

  static SocialEncoderParams init(std::size_t num_users,
                                  const SocialEncoderConfig& config, Rng& rng);

  /// Parameters of the encoder stack only (excludes W_6).
  std::vector<ad::Parameter*> encoder_parameters();
  std::vector<ad::Parameter*> all();
  int layers() const { return static_cast<int>(slopes.size()); }
};

/// Node-shuffling corruption of the input feature rows.
struct CorruptionSample {
  std::vector<std::size_t> permutation;  // output row i takes input row permutation[i]
  Matrix rows;                           // permuted feature rows
  std::uint64_t seed = 0;
  bool informative = true;               // false when the permutation is the identity
};

CorruptionSample corrupt(const Matrix& features, std::uint64_t seed);
/// Permutation only, for one-hot features.
std::vector<std::size_t> corruption_permutation(std::size_t num_users,
                                                std::uint64_t seed);

// Tape operations.

/// H = PReLU(S * X * W) per layer, where `projected` is X * W_1 already.
ad::Var encode_projected(const NormalizedAdjacency& s, ad::Var projected,
                         std::span<const ad::Var> weights,
                         std::span<const ad::Var> slopes);

/// Dense-feature form: first layer computes features * embedding.
ad::Var encode_patches(ad::Tape& tape, const NormalizedAdjacency& s,
                       ad::Var features, SocialEncoderParams& params);

/// One-hot form: row i of the input is the identity row feature_rows[i].
ad::Var encode_one_hot(ad::Tape& tape, const NormalizedAdjacency& s,
                       std::span<const std::size_t> feature_rows,
                       SocialEncoderParams& params);

/// r_s = sigmoid(sum_m H_m * deg_m / sum_{m,m'} a_{m,m'}), shape 1 x d_H.
ad::Var readout(const NormalizedAdjacency& s, ad::Var patches);

/// Per-row logits h_m^T W_6 r_s, shape M x 1.
ad::Var discriminator_logits(ad::Var patches, ad::Var summary, ad::Var w6);

/// Binary cross-entropy over positive and negative logits, averaged over
/// N_pos + N_neg samples.
ad::Var mi_loss(ad::Var positive_logits, ad::Var negative_logits);

// Plain numeric forms.

/// Readout computed directly from a patch matrix. Throws DataError on an
/// empty graph.
Matrix readout(const Matrix& patches, const NormalizedAdjacency& s);
double discriminate(const Matrix& h, const Matrix& summary, const Matrix& w6);
/// Probabilities are clamped to [1e-12, 1 - 1e-12] before the log.
double mi_loss(std::span<const double> positive, std::span<const double> negative);

struct PretrainResult {
  Matrix h_star;
  std::vector<double> losses;  // one per epoch
  SocialEncoderParams params;
  int epochs = 0;
  std::uint64_t seed = 0;
};

/// Runs E_1 epochs of encode, readout, discriminate and Adam descent on the
/// MI loss. Throws NumericalError if the loss diverges.
PretrainResult pretrain(const UserSocialGraph& graph, const PretrainConfig& config);

/// Fraction of clean and corrupted samples the discriminator classifies
/// correctly (threshold 0.5), over `trials` fresh corruptions drawn from
/// `seed`.
double discriminator_accuracy(const UserSocialGraph& graph,
                              SocialEncoderParams& params, std::uint64_t seed,
                              int trials);

}  // namespace srhgnn::social
