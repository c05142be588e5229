#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srhgnn/autodiff.hpp"

namespace srhgnn {

struct GradcheckEntry {
  std::string parameter;
  std::size_t entries = 0;
  double max_relative_error = 0.0;
  double max_abs_gradient = 0.0;
};

/// Compares tape gradients of `loss` against central differences for every
/// entry of every listed parameter. Relative error is
/// |analytic - numeric| / max(|analytic|, |numeric|, floor).
std::vector<GradcheckEntry> gradcheck(std::span<ad::Parameter* const> params,
                                      const std::function<ad::Var(ad::Tape&)>& loss,
                                      double step = 1e-6, double floor = 1e-6);

}  // namespace srhgnn
