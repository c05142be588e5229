#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srhgnn/autodiff.hpp"

namespace srhgnn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over a fixed list of parameters.
///
/// The moment buffers are bound to the parameter list given at construction;
/// step() must be called with the same list in the same order.
class Adam {
 public:
  Adam(std::span<ad::Parameter* const> params, AdamOptions options);

  /// One update from the parameters' current grad buffers. Increments the
  /// step counter. Does not clear gradients.
  void step();
  void zero_grad();

  std::int64_t steps() const { return step_; }
  const AdamOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }

  const Matrix& first_moment(std::size_t i) const { return m_[i]; }
  const Matrix& second_moment(std::size_t i) const { return v_[i]; }

 private:
  std::vector<ad::Parameter*> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  AdamOptions options_;
  std::int64_t step_ = 0;
};

}  // namespace srhgnn
