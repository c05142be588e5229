#pragma once

// BPR reconstruction of relation types (user, item sub-node) and social links
// (user, user) from the final embeddings.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "srhgnn/autodiff.hpp"
#include "srhgnn/graph.hpp"
#include "srhgnn/rng.hpp"

namespace srhgnn::recon {

struct ReconParams {
  ad::Parameter interaction_transform;  // V_1, 2W x h
  ad::Parameter interaction_bias;       // b_r, 1 x h
  ad::Parameter interaction_score;      // W_4, h x 1
  ad::Parameter interaction_slope;
  ad::Parameter social_transform;       // V_2, 2W x h
  ad::Parameter social_bias;            // b_s
  ad::Parameter social_score;           // W_5
  ad::Parameter social_slope;

  /// `embedding_width` is L*d; `hidden` defaults to d at the call site.
  static ReconParams init(std::size_t embedding_width, std::size_t hidden,
                          double prelu_init, Rng& rng);
  std::vector<ad::Parameter*> all();
};

struct RelationTriplet {
  std::size_t user;
  std::size_t item;
  int positive;
  int negative;
};

struct SocialTriplet {
  std::size_t user;
  std::size_t positive;
  std::size_t negative;
};

struct TripletBatch {
  std::vector<RelationTriplet> relations;
  std::vector<SocialTriplet> social;
  std::uint64_t seed = 0;
};

/// k_neg uniform over {1..K} \ {k}. Throws DataError when K == 1.
int sample_negative_relation(int num_relations, int positive, Rng& rng);

/// Uniform over users that are neither m nor adjacent to m. Throws DataError
/// when no such user exists.
std::size_t sample_negative_social(const UserSocialGraph& graph, std::size_t m,
                                   Rng& rng);

/// Draws `negatives` negatives for every listed positive.
TripletBatch sample_triplets(const SubNodeGraph& graph,
                             std::span<const Interaction> positives,
                             const UserSocialGraph& social,
                             std::span<const UserPair> social_positives,
                             int negatives, std::uint64_t seed);

// Tape forms. Scores are B x 1.
ad::Var score_interactions(ad::Var users, ad::Var subnodes,
                           std::span<const std::size_t> user_rows,
                           std::span<const std::size_t> subnode_rows,
                           ReconParams& params);
ad::Var score_social(ad::Var users, std::span<const std::size_t> first,
                     std::span<const std::size_t> second, ReconParams& params);
/// -(1/psi) sum log sigmoid(pos - neg).
ad::Var bpr_loss(ad::Var positive, ad::Var negative, double psi);

/// Interaction-reconstruction and social-reconstruction losses over a batch.
struct ReconLosses {
  ad::Var interaction;
  ad::Var social;
};
ReconLosses reconstruction_losses(ad::Var users, ad::Var subnodes,
                                  const SubNodeGraph& graph,
                                  const TripletBatch& batch, ReconParams& params,
                                  double psi_interactions, double psi_social);

// Plain numeric forms.
double score_interaction(const Matrix& user_row, const Matrix& subnode_row,
                         ReconParams& params);

struct BprLosses {
  double interaction;
  double social;
};
BprLosses bpr_reconstruction_losses(std::span<const double> interaction_pos,
                                    std::span<const double> interaction_neg,
                                    std::span<const double> social_pos,
                                    std::span<const double> social_neg,
                                    std::size_t psi_interactions,
                                    std::size_t psi_social);

}  // namespace srhgnn::recon
