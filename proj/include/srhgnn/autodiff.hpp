#pragma once

// Reverse-mode differentiation over dense row-major matrices.
//
// A Tape records every operation as a node in creation order, which is a
// valid topological order. Tape::backward walks the nodes once in reverse and
// accumulates gradients into the Parameters that were bound to the tape.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "srhgnn/sparse.hpp"

namespace srhgnn::ad {

/// Trainable tensor that outlives any single tape.
class Parameter {
 public:
  Parameter() = default;
  Parameter(std::string name, Matrix value);

  const std::string& name() const { return name_; }
  Matrix& value() { return value_; }
  const Matrix& value() const { return value_; }
  Matrix& grad() { return grad_; }
  const Matrix& grad() const { return grad_; }

  Eigen::Index rows() const { return value_.rows(); }
  Eigen::Index cols() const { return value_.cols(); }
  Eigen::Index size() const { return value_.size(); }

  void zero_grad() { grad_.setZero(value_.rows(), value_.cols()); }

 private:
  std::string name_;
  Matrix value_;
  Matrix grad_;
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var constant(double value);
  /// Binds a parameter; binding the same parameter twice returns the same node
  /// so that gradients from every use accumulate.
  Var parameter(Parameter& p);

  /// Appends an operation node. Throws NumericalError if `value` holds a
  /// NaN or Inf.
  Var record(Matrix value, std::vector<std::size_t> inputs, BackwardFn fn);

  /// Propagates d(loss)/d(node) to every node and adds the result into each
  /// bound Parameter's grad. `loss` must be 1x1.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  /// Gradient buffer of a node; zero-initialized on first access.
  Matrix& grad(std::size_t id);
  /// grad(id) += delta, skipped for nodes that do not require gradients.
  void accumulate(std::size_t id, const Matrix& delta);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter* parameter = nullptr;
    bool requires_grad = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> bound_;
};

// Dense algebra.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, double factor);
/// x (r x c) plus a 1 x c row broadcast to every row.
Var add_row(Var x, Var row);
Var transpose(Var a);

/// S * x with S held constant. S must outlive the tape.
Var spmm(const CsrMatrix& s, Var x);

/// Column-wise concatenation of equal-height blocks.
Var concat_cols(std::span<const Var> parts);
Var concat_cols(Var a, Var b);
Var slice_cols(Var x, Eigen::Index begin, Eigen::Index count);
/// out.row(i) = x.row(rows[i]); backward scatters with accumulation.
Var gather_rows(Var x, std::span<const std::size_t> rows);

// Activations.
/// max(x, 0) + slope * min(x, 0) with a learnable 1x1 slope.
Var prelu(Var x, Var slope);
Var relu(Var x);
Var sigmoid(Var x);
/// log(sigmoid(x)) evaluated without overflow.
Var log_sigmoid(Var x);

// Reductions.
Var sum(Var x);
Var sum_squares(Var x);

}  // namespace srhgnn::ad
