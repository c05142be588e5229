#include "srhgnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace srhgnn {

std::vector<GradcheckEntry> gradcheck(std::span<ad::Parameter* const> params,
                                      const std::function<ad::Var(ad::Tape&)>& loss,
                                      double step, double floor) {
  for (ad::Parameter* p : params) p->zero_grad();
  {
    ad::Tape tape;
    tape.backward(loss(tape));
  }
  auto evaluate = [&loss]() {
    ad::Tape tape;
    return loss(tape).scalar();
  };
  std::vector<GradcheckEntry> out;
  for (ad::Parameter* p : params) {
    GradcheckEntry e;
    e.parameter = p->name();
    e.entries = static_cast<std::size_t>(p->size());
    for (Eigen::Index i = 0; i < p->size(); ++i) {
      double& x = p->value().data()[i];
      const double saved = x;
      x = saved + step;
      const double up = evaluate();
      x = saved - step;
      const double down = evaluate();
      x = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = p->grad().data()[i];
      const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
      e.max_relative_error = std::max(e.max_relative_error, std::abs(analytic - numeric) / scale);
      e.max_abs_gradient = std::max(e.max_abs_gradient, std::abs(analytic));
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace srhgnn
