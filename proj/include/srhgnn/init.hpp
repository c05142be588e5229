#pragma once

#include <cmath>
#include <string>

#include "srhgnn/autodiff.hpp"
#include "srhgnn/rng.hpp"

namespace srhgnn {

/// Xavier/Glorot uniform: U(-a, a) with a = sqrt(6 / (rows + cols)).
inline Matrix xavier_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-a, a);
  return m;
}

inline ad::Parameter xavier_parameter(std::string name, Eigen::Index rows,
                                      Eigen::Index cols, Rng& rng) {
  return ad::Parameter(std::move(name), xavier_uniform(rows, cols, rng));
}

inline ad::Parameter zero_parameter(std::string name, Eigen::Index rows,
                                    Eigen::Index cols) {
  return ad::Parameter(std::move(name), Matrix::Zero(rows, cols));
}

inline ad::Parameter scalar_parameter(std::string name, double value) {
  return ad::Parameter(std::move(name), Matrix::Constant(1, 1, value));
}

}  // namespace srhgnn
