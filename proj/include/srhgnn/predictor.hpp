#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srhgnn/autodiff.hpp"
#include "srhgnn/rng.hpp"

namespace srhgnn::predict {

/// Two-layer rating head: ReLU([E_u (+) E_v] V_3 + b_1) V_4 + b_2.
struct PredictorParams {
  ad::Parameter hidden_weight;  // V_3, 2W x d
  ad::Parameter hidden_bias;    // b_1, 1 x d
  ad::Parameter output_weight;  // V_4, d x 1
  ad::Parameter output_bias;    // b_2, 1 x 1

  static PredictorParams init(std::size_t embedding_width, std::size_t hidden,
                              Rng& rng);
  std::vector<ad::Parameter*> all();
};

/// Raw (unclamped) predictions for each (user_rows[i], item_rows[i]), B x 1.
ad::Var predict(ad::Var users, ad::Var items, std::span<const std::size_t> user_rows,
                std::span<const std::size_t> item_rows, PredictorParams& params);
double predict(const Matrix& user_row, const Matrix& item_row, PredictorParams& params);

/// (1/2) sum (r - r_hat)^2 over the listed pairs. Throws ContractError when empty.
ad::Var prediction_loss(ad::Var predictions, std::span<const double> truths);
/// Masked form; pairs with mask == false are ignored.
double prediction_loss(std::span<const double> predictions,
                       std::span<const double> truths, std::span<const bool> mask);

struct LossWeights {
  double interaction = 0.01;     // omega_1
  double social = 0.01;          // omega_2
  double regularization = 1e-4;  // omega_r
};

/// L = L_p + w1 L_r + w2 L_s + wr ||Theta||^2.
double joint_loss(double prediction, double interaction, double social,
                  double theta_squared_norm, const LossWeights& weights);
ad::Var joint_loss(ad::Var prediction, ad::Var interaction, ad::Var social,
                   ad::Var theta_squared_norm, const LossWeights& weights);

/// Sum of squared Frobenius norms of every parameter, on the tape.
ad::Var squared_norm(ad::Tape& tape, std::span<ad::Parameter* const> params);

}  // namespace srhgnn::predict
