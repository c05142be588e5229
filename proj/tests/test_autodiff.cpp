#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srhgnn/autodiff.hpp"
#include "srhgnn/errors.hpp"

using namespace srhgnn;
using namespace srhgnn::ad;

namespace {

double fd_relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

}  // namespace

TEST_CASE("x^2 at 3 has gradient 6") {
  Parameter x("x", Matrix::Constant(1, 1, 3.0));
  Tape tape;
  Var v = tape.parameter(x);
  tape.backward(mul(v, v));
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("sigmoid at 0 has gradient 0.25") {
  Parameter x("x", Matrix::Zero(1, 1));
  Tape tape;
  tape.backward(sum(sigmoid(tape.parameter(x))));
  CHECK(x.grad()(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("prelu forward and piecewise derivatives") {
  Parameter x("x", Matrix{{2.0, -2.0}});
  Parameter a("a", Matrix::Constant(1, 1, 0.25));
  Tape tape;
  Var y = prelu(tape.parameter(x), tape.parameter(a));
  CHECK(y.value()(0, 0) == 2.0);
  CHECK(y.value()(0, 1) == -0.5);
  tape.backward(sum(y));
  CHECK(x.grad()(0, 0) == 1.0);
  CHECK(x.grad()(0, 1) == 0.25);
  CHECK(a.grad()(0, 0) == -2.0);
}

TEST_CASE("prelu with slope 1 is identity, slope 0 is relu") {
  Rng rng(5);
  const Matrix x = oracle::random_matrix(4, 5, rng);
  Tape tape;
  Var v = tape.constant(x);
  CHECK(prelu(v, tape.constant(1.0)).value() == x);
  CHECK(prelu(v, tape.constant(0.0)).value() == relu(v).value());
}

TEST_CASE("backward rejects non-scalar loss") {
  Parameter x("x", Matrix::Zero(2, 2));
  Tape tape;
  CHECK_THROWS_AS(tape.backward(tape.parameter(x)), ContractError);
}

TEST_CASE("NaN values are detected") {
  Tape tape;
  Var bad = tape.constant(Matrix::Constant(1, 1, -1.0));
  Parameter p("p", Matrix::Constant(1, 1, std::nan("")));
  CHECK_THROWS_AS(tape.parameter(p), NumericalError);
  CHECK_THROWS_AS(scale(bad, std::numeric_limits<double>::infinity()), NumericalError);
}

TEST_CASE("gradients accumulate across repeated uses of a parameter") {
  Parameter w("w", Matrix{{1.5, -0.5}});
  Tape tape;
  Var a = tape.parameter(w);
  Var b = tape.parameter(w);
  CHECK(a.id() == b.id());
  tape.backward(add(sum(a), sum(scale(b, 3.0))));
  CHECK(w.grad()(0, 0) == 4.0);
  CHECK(w.grad()(0, 1) == 4.0);
}

TEST_CASE("linearity of backward: grad(a f + b g) = a grad f + b grad g") {
  Rng rng(6);
  Parameter x("x", oracle::random_matrix(3, 4, rng));
  const Matrix w = oracle::random_matrix(4, 2, rng);
  auto f = [&](Tape& t) { return sum_squares(matmul(t.parameter(x), t.constant(w))); };
  auto g = [&](Tape& t) { return sum(sigmoid(t.parameter(x))); };
  auto grad_of = [&](auto&& fn) {
    x.zero_grad();
    Tape t;
    t.backward(fn(t));
    return Matrix(x.grad());
  };
  const Matrix gf = grad_of(f);
  const Matrix gg = grad_of(g);
  const Matrix combined = grad_of([&](Tape& t) { return add(scale(f(t), 2.0), scale(g(t), -3.0)); });
  CHECK((combined - (2.0 * gf - 3.0 * gg)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("random compositions match central finite differences") {
  // Every differentiable op appears in at least one composition.
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto r = static_cast<Eigen::Index>(1 + rng.index(8));
    const auto c = static_cast<Eigen::Index>(1 + rng.index(8));
    const auto k = static_cast<Eigen::Index>(1 + rng.index(8));
    Parameter a("a", oracle::random_matrix(r, c, rng));
    Parameter b("b", oracle::random_matrix(c, k, rng));
    Parameter bias("bias", oracle::random_matrix(1, k, rng));
    Parameter slope("slope", Matrix::Constant(1, 1, 0.25));
    Parameter other("other", oracle::random_matrix(r, k, rng));
    std::vector<Triplet> trip;
    for (std::size_t i = 0; i < static_cast<std::size_t>(r); ++i) {
      for (std::size_t j = 0; j < static_cast<std::size_t>(r); ++j) {
        if (rng.uniform() < 0.4) trip.push_back({i, j, rng.uniform(-1, 1)});
      }
    }
    const CsrMatrix s = CsrMatrix::from_triplets(static_cast<std::size_t>(r),
                                                 static_cast<std::size_t>(r), trip);
    std::vector<std::size_t> rows;
    for (int i = 0; i < 5; ++i) rows.push_back(rng.index(static_cast<std::size_t>(r)));

    auto loss = [&](Tape& t) {
      Var h = add_row(matmul(t.parameter(a), t.parameter(b)), t.parameter(bias));
      h = prelu(spmm(s, h), t.parameter(slope));
      Var cat = concat_cols(h, sigmoid(t.parameter(other)));
      Var picked = gather_rows(cat, rows);
      Var sliced = slice_cols(picked, 0, k);
      Var tail = sub(mul(sliced, sliced), relu(gather_rows(t.parameter(other), rows)));
      return add(sum(log_sigmoid(tail)), sum_squares(transpose(h)));
    };
    std::vector<Parameter*> params{&a, &b, &bias, &slope, &other};
    for (auto* p : params) p->zero_grad();
    {
      Tape t;
      t.backward(loss(t));
    }
    auto value = [&] {
      Tape t;
      return loss(t).scalar();
    };
    for (auto* p : params) {
      for (Eigen::Index i = 0; i < p->size(); ++i) {
        const double numeric = oracle::central_difference(*p, i, value, 1e-6);
        CHECK(fd_relative_error(p->grad().data()[i], numeric) < 1e-4);
      }
    }
  }
}
