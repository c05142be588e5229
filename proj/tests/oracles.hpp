#pragma once

// Test-only reference computations. Everything here works on plain dense
// loops and never calls into the sparse or tape code paths it checks.

#include <cmath>
#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include "srhgnn/autodiff.hpp"
#include "srhgnn/graph.hpp"
#include "srhgnn/rng.hpp"

namespace oracle {

using srhgnn::Matrix;

inline Matrix dense_matmul(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  }
  return out;
}

inline Matrix prelu(const Matrix& x, double slope) {
  Matrix out = x;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out.data()[i] < 0) out.data()[i] *= slope;
  }
  return out;
}

/// D^-1/2 (A + I) D^-1/2 from a dense adjacency, entry by entry.
inline Matrix normalized_adjacency(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix hat = a;
  for (Eigen::Index i = 0; i < n; ++i) hat(i, i) += 1.0;
  std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) deg[static_cast<std::size_t>(i)] += hat(i, j);
  }
  Matrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      s(i, j) = hat(i, j) / std::sqrt(deg[static_cast<std::size_t>(i)] *
                                      deg[static_cast<std::size_t>(j)]);
    }
  }
  return s;
}

/// Dense adjacency of an undirected edge list.
inline Matrix dense_adjacency(std::size_t n, const std::vector<srhgnn::UserPair>& edges) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
    a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
  }
  return a;
}

/// Full (M + NK) x (M + NK) propagation operator: self decay on the
/// diagonal, 1/sqrt(|J_m| |J_{n,k}|) on each user / sub-node edge.
inline Matrix propagation_operator(std::size_t users, std::size_t items, int relations,
                                   const std::vector<srhgnn::Interaction>& interactions) {
  const std::size_t subnodes = items * static_cast<std::size_t>(relations);
  const std::size_t n = users + subnodes;
  std::vector<double> deg(n, 0.0);
  auto col = [&](const srhgnn::Interaction& x) {
    return users + x.item * static_cast<std::size_t>(relations) +
           static_cast<std::size_t>(x.relation - 1);
  };
  for (const auto& x : interactions) {
    deg[x.user] += 1.0;
    deg[col(x)] += 1.0;
  }
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        deg[i] == 0.0 ? 1.0 : 1.0 / std::sqrt(deg[i]);
  }
  for (const auto& x : interactions) {
    const double lambda = 1.0 / std::sqrt(deg[x.user] * deg[col(x)]);
    p(static_cast<Eigen::Index>(x.user), static_cast<Eigen::Index>(col(x))) = lambda;
    p(static_cast<Eigen::Index>(col(x)), static_cast<Eigen::Index>(x.user)) = lambda;
  }
  return p;
}

/// Central finite differences of a scalar function of one parameter entry.
inline double central_difference(srhgnn::ad::Parameter& p, Eigen::Index index,
                                 const std::function<double()>& f, double step) {
  double& x = p.value().data()[index];
  const double saved = x;
  x = saved + step;
  const double up = f();
  x = saved - step;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * step);
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, srhgnn::Rng& rng,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

}  // namespace oracle

namespace oracle {

/// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over every
/// entry of every parameter, with numeric gradients from central differences.
inline double max_gradient_error(std::span<srhgnn::ad::Parameter* const> params,
                                 const std::function<srhgnn::ad::Var(srhgnn::ad::Tape&)>& loss,
                                 double step = 1e-6, double floor = 1e-6) {
  for (auto* p : params) p->zero_grad();
  {
    srhgnn::ad::Tape tape;
    tape.backward(loss(tape));
  }
  auto value = [&] {
    srhgnn::ad::Tape tape;
    return loss(tape).scalar();
  };
  double worst = 0.0;
  for (auto* p : params) {
    for (Eigen::Index i = 0; i < p->size(); ++i) {
      const double a = p->grad().data()[i];
      const double n = central_difference(*p, i, value, step);
      worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}));
    }
  }
  return worst;
}

}  // namespace oracle
