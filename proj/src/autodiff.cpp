#include "srhgnn/autodiff.hpp"

#include <cmath>
#include <string>

#include "srhgnn/errors.hpp"

namespace srhgnn::ad {

namespace {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError(std::string(op) + ": shape mismatch " + shape_of(a) +
                        " vs " + shape_of(b));
  }
}

void require_same_tape(const Var& a, const Var& b) {
  if (&a.tape() != &b.tape()) throw ContractError("operands on different tapes");
}

double stable_log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Parameter::Parameter(std::string name, Matrix value)
    : name_(std::move(name)), value_(std::move(value)) {
  zero_grad();
}

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw ContractError("scalar() on a " + shape_of(v) + " node");
  }
  return v(0, 0);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::constant(double value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return constant(std::move(m));
}

Var Tape::parameter(Parameter& p) {
  if (auto it = bound_.find(&p); it != bound_.end()) return Var(this, it->second);
  if (!p.value().allFinite()) {
    throw NumericalError("parameter '" + p.name() + "' holds NaN/Inf");
  }
  Node n;
  n.value = p.value();
  n.parameter = &p;
  n.requires_grad = true;
  Var v = push(std::move(n));
  bound_.emplace(&p, v.id());
  return v;
}

Var Tape::record(Matrix value, std::vector<std::size_t> inputs, BackwardFn fn) {
  if (!value.allFinite()) {
    throw NumericalError("non-finite value produced at tape node " +
                         std::to_string(nodes_.size()));
  }
  Node n;
  n.value = std::move(value);
  for (std::size_t id : inputs) n.requires_grad = n.requires_grad || nodes_[id].requires_grad;
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

Matrix& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0 && n.value.size() != 0) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

void Tape::accumulate(std::size_t id, const Matrix& delta) {
  if (!nodes_[id].requires_grad) return;
  grad(id) += delta;
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw ContractError("backward: loss is on another tape");
  const Matrix& v = value(loss.id());
  if (v.rows() != 1 || v.cols() != 1) {
    throw ContractError("backward requires a scalar loss, got " + shape_of(v));
  }
  if (!nodes_[loss.id()].requires_grad) return;
  grad(loss.id())(0, 0) += 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
    if (n.parameter != nullptr) n.parameter->grad() += n.grad;
  }
}

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  if (a.cols() != b.rows()) {
    throw ContractError("matmul: " + shape_of(a.value()) + " times " +
                        shape_of(b.value()));
  }
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(a.value() * b.value(), {ia, ib},
                         [ia, ib](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           if (t.requires_grad(ia)) {
                             t.accumulate(ia, g * t.value(ib).transpose());
                           }
                           if (t.requires_grad(ib)) {
                             t.accumulate(ib, t.value(ia).transpose() * g);
                           }
                         });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape("add", a.value(), b.value());
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(a.value() + b.value(), {ia, ib},
                         [ia, ib](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           t.accumulate(ia, g);
                           t.accumulate(ib, g);
                         });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape("sub", a.value(), b.value());
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(a.value() - b.value(), {ia, ib},
                         [ia, ib](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           t.accumulate(ia, g);
                           t.accumulate(ib, -g);
                         });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape("mul", a.value(), b.value());
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(a.value().cwiseProduct(b.value()), {ia, ib},
                         [ia, ib](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           t.accumulate(ia, g.cwiseProduct(t.value(ib)));
                           t.accumulate(ib, g.cwiseProduct(t.value(ia)));
                         });
}

Var scale(Var a, double factor) {
  const std::size_t ia = a.id();
  return a.tape().record(a.value() * factor, {ia},
                         [ia, factor](Tape& t, std::size_t self) {
                           t.accumulate(ia, t.grad(self) * factor);
                         });
}

Var add_row(Var x, Var row) {
  require_same_tape(x, row);
  if (row.rows() != 1 || row.cols() != x.cols()) {
    throw ContractError("add_row: cannot broadcast " + shape_of(row.value()) +
                        " over " + shape_of(x.value()));
  }
  const std::size_t ix = x.id();
  const std::size_t ir = row.id();
  Matrix out = x.value().rowwise() + row.value().row(0);
  return x.tape().record(std::move(out), {ix, ir},
                         [ix, ir](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           t.accumulate(ix, g);
                           if (t.requires_grad(ir)) {
                             t.accumulate(ir, g.colwise().sum());
                           }
                         });
}

Var transpose(Var a) {
  const std::size_t ia = a.id();
  return a.tape().record(a.value().transpose(), {ia},
                         [ia](Tape& t, std::size_t self) {
                           t.accumulate(ia, t.grad(self).transpose());
                         });
}

Var spmm(const CsrMatrix& s, Var x) {
  const std::size_t ix = x.id();
  const CsrMatrix* sp = &s;
  return x.tape().record(s.multiply(x.value()), {ix},
                         [ix, sp](Tape& t, std::size_t self) {
                           if (t.requires_grad(ix)) {
                             t.accumulate(ix, sp->transpose_multiply(t.grad(self)));
                           }
                         });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> offsets;
  for (const Var& p : parts) {
    require_same_tape(parts.front(), p);
    if (p.rows() != rows) {
      throw ContractError("concat_cols: ragged heights " + std::to_string(rows) +
                          " vs " + std::to_string(p.rows()));
    }
    ids.push_back(p.id());
    offsets.push_back(cols);
    cols += p.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.middleCols(offsets[i], parts[i].cols()) = parts[i].value();
  }
  return parts.front().tape().record(
      std::move(out), ids, [ids, offsets](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!t.requires_grad(ids[i])) continue;
          t.accumulate(ids[i], g.middleCols(offsets[i], t.value(ids[i]).cols()));
        }
      });
}

Var concat_cols(Var a, Var b) {
  const Var parts[] = {a, b};
  return concat_cols(std::span<const Var>(parts));
}

Var slice_cols(Var x, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > x.cols()) {
    throw ContractError("slice_cols: range out of bounds");
  }
  const std::size_t ix = x.id();
  return x.tape().record(x.value().middleCols(begin, count), {ix},
                         [ix, begin, count](Tape& t, std::size_t self) {
                           Matrix& gx = t.grad(ix);
                           gx.middleCols(begin, count) += t.grad(self);
                         });
}

Var gather_rows(Var x, std::span<const std::size_t> rows) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i]) >= n) {
      throw ContractError("gather_rows: row " + std::to_string(rows[i]) +
                          " out of range " + std::to_string(n));
    }
    out.row(static_cast<Eigen::Index>(i)) =
        x.value().row(static_cast<Eigen::Index>(rows[i]));
  }
  const std::size_t ix = x.id();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return x.tape().record(std::move(out), {ix},
                         [ix, idx = std::move(idx)](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           Matrix& gx = t.grad(ix);
                           for (std::size_t i = 0; i < idx.size(); ++i) {
                             gx.row(static_cast<Eigen::Index>(idx[i])) +=
                                 g.row(static_cast<Eigen::Index>(i));
                           }
                         });
}

Var prelu(Var x, Var slope) {
  require_same_tape(x, slope);
  if (slope.rows() != 1 || slope.cols() != 1) {
    throw ContractError("prelu: slope must be 1x1");
  }
  const double a = slope.scalar();
  const Matrix out = x.value().unaryExpr(
      [a](double v) { return v > 0.0 ? v : a * v; });
  const std::size_t ix = x.id();
  const std::size_t is = slope.id();
  return x.tape().record(out, {ix, is}, [ix, is](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& xv = t.value(ix);
    const double a = t.value(is)(0, 0);
    if (t.requires_grad(ix)) {
      Matrix gx = g;
      for (Eigen::Index i = 0; i < gx.size(); ++i) {
        if (!(xv.data()[i] > 0.0)) gx.data()[i] *= a;
      }
      t.accumulate(ix, gx);
    }
    if (t.requires_grad(is)) {
      double gs = 0.0;
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!(xv.data()[i] > 0.0)) gs += g.data()[i] * xv.data()[i];
      }
      Matrix d(1, 1);
      d(0, 0) = gs;
      t.accumulate(is, d);
    }
  });
}

Var relu(Var x) {
  const std::size_t ix = x.id();
  return x.tape().record(x.value().cwiseMax(0.0), {ix},
                         [ix](Tape& t, std::size_t self) {
                           const Matrix& xv = t.value(ix);
                           Matrix gx = t.grad(self);
                           for (Eigen::Index i = 0; i < gx.size(); ++i) {
                             if (!(xv.data()[i] > 0.0)) gx.data()[i] = 0.0;
                           }
                           t.accumulate(ix, gx);
                         });
}

Var sigmoid(Var x) {
  const std::size_t ix = x.id();
  Matrix out = x.value().unaryExpr(&stable_sigmoid);
  return x.tape().record(std::move(out), {ix}, [ix](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    t.accumulate(ix, t.grad(self).cwiseProduct(
                         y.cwiseProduct((1.0 - y.array()).matrix())));
  });
}

Var log_sigmoid(Var x) {
  const std::size_t ix = x.id();
  Matrix out = x.value().unaryExpr(&stable_log_sigmoid);
  return x.tape().record(std::move(out), {ix}, [ix](Tape& t, std::size_t self) {
    // d/dx log sigmoid(x) = sigmoid(-x)
    const Matrix s = t.value(ix).unaryExpr([](double v) { return stable_sigmoid(-v); });
    t.accumulate(ix, t.grad(self).cwiseProduct(s));
  });
}

Var sum(Var x) {
  const std::size_t ix = x.id();
  Matrix out(1, 1);
  out(0, 0) = x.value().sum();
  return x.tape().record(std::move(out), {ix}, [ix](Tape& t, std::size_t self) {
    const double g = t.grad(self)(0, 0);
    const Matrix& xv = t.value(ix);
    t.accumulate(ix, Matrix::Constant(xv.rows(), xv.cols(), g));
  });
}

Var sum_squares(Var x) {
  const std::size_t ix = x.id();
  Matrix out(1, 1);
  out(0, 0) = x.value().squaredNorm();
  return x.tape().record(std::move(out), {ix}, [ix](Tape& t, std::size_t self) {
    const double g = t.grad(self)(0, 0);
    t.accumulate(ix, t.value(ix) * (2.0 * g));
  });
}

}  // namespace srhgnn::ad
