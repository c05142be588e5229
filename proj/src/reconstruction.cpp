#include "srhgnn/reconstruction.hpp"

#include <cmath>
#include <string>

#include "srhgnn/errors.hpp"
#include "srhgnn/init.hpp"

namespace srhgnn::recon {

ReconParams ReconParams::init(std::size_t embedding_width, std::size_t hidden,
                              double prelu_init, Rng& rng) {
  const auto in = static_cast<Eigen::Index>(2 * embedding_width);
  const auto h = static_cast<Eigen::Index>(hidden);
  ReconParams p;
  p.interaction_transform = xavier_parameter("recon.interaction_transform", in, h, rng);
  p.interaction_bias = zero_parameter("recon.interaction_bias", 1, h);
  p.interaction_score = xavier_parameter("recon.interaction_score", h, 1, rng);
  p.interaction_slope = scalar_parameter("recon.interaction_slope", prelu_init);
  p.social_transform = xavier_parameter("recon.social_transform", in, h, rng);
  p.social_bias = zero_parameter("recon.social_bias", 1, h);
  p.social_score = xavier_parameter("recon.social_score", h, 1, rng);
  p.social_slope = scalar_parameter("recon.social_slope", prelu_init);
  return p;
}

std::vector<ad::Parameter*> ReconParams::all() {
  return {&interaction_transform, &interaction_bias, &interaction_score,
          &interaction_slope,     &social_transform,  &social_bias,
          &social_score,          &social_slope};
}

int sample_negative_relation(int num_relations, int positive, Rng& rng) {
  if (num_relations < 2) {
    throw DataError("no negative relation type exists when K = 1");
  }
  // Draw from K-1 slots and skip over the positive.
  const int k = static_cast<int>(rng.index(static_cast<std::size_t>(num_relations - 1))) + 1;
  return k >= positive ? k + 1 : k;
}

std::size_t sample_negative_social(const UserSocialGraph& graph, std::size_t m,
                                   Rng& rng) {
  const std::size_t n = graph.num_users;
  const std::size_t blocked = graph.degree(m) + 1;
  if (blocked >= n) {
    throw DataError("user " + std::to_string(m) + " has no non-connected users");
  }
  if (2 * blocked <= n) {
    for (;;) {
      const std::size_t c = rng.index(n);
      if (c != m && !graph.connected(m, c)) return c;
    }
  }
  std::vector<std::size_t> candidates;
  candidates.reserve(n - blocked);
  for (std::size_t c = 0; c < n; ++c) {
    if (c != m && !graph.connected(m, c)) candidates.push_back(c);
  }
  return candidates[rng.index(candidates.size())];
}

TripletBatch sample_triplets(const SubNodeGraph& graph,
                             std::span<const Interaction> positives,
                             const UserSocialGraph& social,
                             std::span<const UserPair> social_positives,
                             int negatives, std::uint64_t seed) {
  TripletBatch batch;
  batch.seed = seed;
  Rng rng(seed);
  if (graph.num_relations() >= 2) {
    batch.relations.reserve(positives.size() * static_cast<std::size_t>(negatives));
    for (const Interaction& x : positives) {
      for (int s = 0; s < negatives; ++s) {
        batch.relations.push_back(
            {x.user, x.item, x.relation,
             sample_negative_relation(graph.num_relations(), x.relation, rng)});
      }
    }
  }
  for (const auto& [a, b] : social_positives) {
    // Anchor each undirected edge at a random endpoint that has a negative.
    std::size_t anchor = a;
    std::size_t other = b;
    if (rng.index(2) == 1) std::swap(anchor, other);
    if (social.degree(anchor) + 1 >= social.num_users) std::swap(anchor, other);
    if (social.degree(anchor) + 1 >= social.num_users) continue;
    for (int s = 0; s < negatives; ++s) {
      batch.social.push_back({anchor, other, sample_negative_social(social, anchor, rng)});
    }
  }
  return batch;
}

namespace {

ad::Var pair_score(ad::Var left, ad::Var right, ad::Parameter& transform,
                   ad::Parameter& bias, ad::Parameter& score, ad::Parameter& slope) {
  ad::Tape& tape = left.tape();
  ad::Var hidden = ad::add_row(ad::matmul(ad::concat_cols(left, right),
                                          tape.parameter(transform)),
                               tape.parameter(bias));
  return ad::matmul(ad::prelu(hidden, tape.parameter(slope)), tape.parameter(score));
}

}  // namespace

ad::Var score_interactions(ad::Var users, ad::Var subnodes,
                           std::span<const std::size_t> user_rows,
                           std::span<const std::size_t> subnode_rows,
                           ReconParams& params) {
  return pair_score(ad::gather_rows(users, user_rows),
                    ad::gather_rows(subnodes, subnode_rows),
                    params.interaction_transform, params.interaction_bias,
                    params.interaction_score, params.interaction_slope);
}

ad::Var score_social(ad::Var users, std::span<const std::size_t> first,
                     std::span<const std::size_t> second, ReconParams& params) {
  return pair_score(ad::gather_rows(users, first), ad::gather_rows(users, second),
                    params.social_transform, params.social_bias,
                    params.social_score, params.social_slope);
}

ad::Var bpr_loss(ad::Var positive, ad::Var negative, double psi) {
  return ad::scale(ad::sum(ad::log_sigmoid(ad::sub(positive, negative))), -1.0 / psi);
}

ReconLosses reconstruction_losses(ad::Var users, ad::Var subnodes,
                                  const SubNodeGraph& graph,
                                  const TripletBatch& batch, ReconParams& params,
                                  double psi_interactions, double psi_social) {
  ad::Tape& tape = users.tape();
  ReconLosses out{tape.constant(0.0), tape.constant(0.0)};
  if (!batch.relations.empty()) {
    std::vector<std::size_t> u;
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (const auto& t : batch.relations) {
      u.push_back(t.user);
      pos.push_back(graph.subnode(t.item, t.positive));
      neg.push_back(graph.subnode(t.item, t.negative));
    }
    out.interaction = bpr_loss(score_interactions(users, subnodes, u, pos, params),
                               score_interactions(users, subnodes, u, neg, params),
                               psi_interactions);
  }
  if (!batch.social.empty()) {
    std::vector<std::size_t> a;
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (const auto& t : batch.social) {
      a.push_back(t.user);
      pos.push_back(t.positive);
      neg.push_back(t.negative);
    }
    out.social = bpr_loss(score_social(users, a, pos, params),
                          score_social(users, a, neg, params), psi_social);
  }
  return out;
}

double score_interaction(const Matrix& user_row, const Matrix& subnode_row,
                         ReconParams& params) {
  ad::Tape tape;
  ad::Var u = tape.constant(user_row);
  ad::Var v = tape.constant(subnode_row);
  const std::size_t zero = 0;
  return score_interactions(u, v, std::span(&zero, 1), std::span(&zero, 1), params)
      .value()(0, 0);
}

namespace {

double bpr(std::span<const double> pos, std::span<const double> neg, std::size_t psi) {
  if (pos.size() != neg.size()) throw ContractError("bpr: unpaired scores");
  if (pos.empty()) return 0.0;
  if (psi == 0) throw ContractError("bpr: psi must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double x = pos[i] - neg[i];
    total += x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
  }
  return -total / static_cast<double>(psi);
}

}  // namespace

BprLosses bpr_reconstruction_losses(std::span<const double> interaction_pos,
                                    std::span<const double> interaction_neg,
                                    std::span<const double> social_pos,
                                    std::span<const double> social_neg,
                                    std::size_t psi_interactions,
                                    std::size_t psi_social) {
  return {bpr(interaction_pos, interaction_neg, psi_interactions),
          bpr(social_pos, social_neg, psi_social)};
}

}  // namespace srhgnn::recon
