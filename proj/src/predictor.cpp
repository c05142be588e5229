#include "srhgnn/predictor.hpp"

#include "srhgnn/errors.hpp"
#include "srhgnn/init.hpp"

namespace srhgnn::predict {

PredictorParams PredictorParams::init(std::size_t embedding_width, std::size_t hidden,
                                      Rng& rng) {
  const auto in = static_cast<Eigen::Index>(2 * embedding_width);
  const auto h = static_cast<Eigen::Index>(hidden);
  PredictorParams p;
  p.hidden_weight = xavier_parameter("predict.hidden_weight", in, h, rng);
  p.hidden_bias = zero_parameter("predict.hidden_bias", 1, h);
  p.output_weight = xavier_parameter("predict.output_weight", h, 1, rng);
  p.output_bias = zero_parameter("predict.output_bias", 1, 1);
  return p;
}

std::vector<ad::Parameter*> PredictorParams::all() {
  return {&hidden_weight, &hidden_bias, &output_weight, &output_bias};
}

ad::Var predict(ad::Var users, ad::Var items, std::span<const std::size_t> user_rows,
                std::span<const std::size_t> item_rows, PredictorParams& params) {
  if (user_rows.size() != item_rows.size()) {
    throw ContractError("predict: unpaired user/item rows");
  }
  ad::Tape& tape = users.tape();
  ad::Var joint = ad::concat_cols(ad::gather_rows(users, user_rows),
                                  ad::gather_rows(items, item_rows));
  ad::Var hidden = ad::relu(ad::add_row(ad::matmul(joint, tape.parameter(params.hidden_weight)),
                                        tape.parameter(params.hidden_bias)));
  return ad::add_row(ad::matmul(hidden, tape.parameter(params.output_weight)),
                     tape.parameter(params.output_bias));
}

double predict(const Matrix& user_row, const Matrix& item_row, PredictorParams& params) {
  ad::Tape tape;
  const std::size_t zero = 0;
  return predict(tape.constant(user_row), tape.constant(item_row), std::span(&zero, 1),
                 std::span(&zero, 1), params)
      .value()(0, 0);
}

ad::Var prediction_loss(ad::Var predictions, std::span<const double> truths) {
  if (truths.empty()) throw ContractError("prediction loss over an empty pair set");
  if (static_cast<std::size_t>(predictions.rows()) != truths.size() ||
      predictions.cols() != 1) {
    throw ContractError("prediction loss: predictions/truths length mismatch");
  }
  Matrix target(static_cast<Eigen::Index>(truths.size()), 1);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    target(static_cast<Eigen::Index>(i), 0) = truths[i];
  }
  ad::Var residual = ad::sub(predictions, predictions.tape().constant(std::move(target)));
  return ad::scale(ad::sum_squares(residual), 0.5);
}

double prediction_loss(std::span<const double> predictions,
                       std::span<const double> truths, std::span<const bool> mask) {
  if (predictions.size() != truths.size() || truths.size() != mask.size()) {
    throw ContractError("prediction loss: length mismatch");
  }
  double total = 0.0;
  std::size_t observed = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (!mask[i]) continue;
    const double e = truths[i] - predictions[i];
    total += e * e;
    ++observed;
  }
  if (observed == 0) throw ContractError("prediction loss over an empty mask");
  return 0.5 * total;
}

double joint_loss(double prediction, double interaction, double social,
                  double theta_squared_norm, const LossWeights& weights) {
  return prediction + weights.interaction * interaction + weights.social * social +
         weights.regularization * theta_squared_norm;
}

ad::Var joint_loss(ad::Var prediction, ad::Var interaction, ad::Var social,
                   ad::Var theta_squared_norm, const LossWeights& weights) {
  ad::Var total = prediction;
  total = ad::add(total, ad::scale(interaction, weights.interaction));
  total = ad::add(total, ad::scale(social, weights.social));
  return ad::add(total, ad::scale(theta_squared_norm, weights.regularization));
}

ad::Var squared_norm(ad::Tape& tape, std::span<ad::Parameter* const> params) {
  ad::Var total = tape.constant(0.0);
  for (ad::Parameter* p : params) {
    if (p->size() == 0) continue;
    total = ad::add(total, ad::sum_squares(tape.parameter(*p)));
  }
  return total;
}

}  // namespace srhgnn::predict
