#include "srhgnn/adam.hpp"

#include <cmath>

#include "srhgnn/errors.hpp"

namespace srhgnn {

Adam::Adam(std::span<ad::Parameter* const> params, AdamOptions options)
    : params_(params.begin(), params.end()), options_(options) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const ad::Parameter* p : params_) {
    m_.push_back(Matrix::Zero(p->rows(), p->cols()));
    v_.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
}

void Adam::step() {
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = options_.learning_rate;
  const double eps = options_.epsilon;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ad::Parameter& p = *params_[i];
    if (p.grad().rows() != p.rows() || p.grad().cols() != p.cols()) {
      throw ContractError("adam: gradient shape mismatch for '" + p.name() + "'");
    }
    m_[i] = b1 * m_[i] + (1.0 - b1) * p.grad();
    v_[i] = b2 * v_[i] + (1.0 - b2) * p.grad().cwiseAbs2();
    auto m_hat = m_[i].array() / correction1;
    auto v_hat = v_[i].array() / correction2;
    p.value().array() -= lr * m_hat / (v_hat.sqrt() + eps);
  }
}

void Adam::zero_grad() {
  for (ad::Parameter* p : params_) p->zero_grad();
}

}  // namespace srhgnn
