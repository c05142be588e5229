#include <doctest.h>

#include <array>

#include "oracles.hpp"
#include "srhgnn/errors.hpp"
#include "srhgnn/predictor.hpp"

using namespace srhgnn;
using predict::LossWeights;
using predict::PredictorParams;
using predict::joint_loss;
using predict::prediction_loss;
using predict::squared_norm;

namespace {

PredictorParams make_params(std::size_t width, std::size_t hidden, std::uint64_t seed) {
  Rng rng(seed);
  return PredictorParams::init(width, hidden, rng);
}

}  // namespace

TEST_SUITE("predict") {
  TEST_CASE("zero output weight predicts the output bias everywhere") {
    auto p = make_params(3, 4, 1);
    p.output_weight.value().setZero();
    p.output_bias.value()(0, 0) = 3.0;
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
      CHECK(predict::predict(oracle::random_matrix(1, 3, rng), oracle::random_matrix(1, 3, rng), p) == 3.0);
    }
  }

  TEST_CASE("an all-negative hidden layer collapses to the output bias") {
    auto p = make_params(2, 3, 3);
    p.hidden_weight.value().setZero();
    p.hidden_bias.value().setConstant(-1.0);
    p.output_bias.value()(0, 0) = 1.7;
    CHECK(predict::predict(Matrix{{1.0, 2.0}}, Matrix{{3.0, 4.0}}, p) == 1.7);
  }

  TEST_CASE("two-dimensional hand case gives 3.5") {
    auto p = make_params(1, 2, 4);
    p.hidden_weight.value() = Matrix::Identity(2, 2);
    p.hidden_bias.value().setZero();
    p.output_weight.value() = Matrix{{1.0}, {2.0}};
    p.output_bias.value()(0, 0) = 0.5;
    CHECK(predict::predict(Matrix{{1.0}}, Matrix{{1.0}}, p) == 3.5);
  }

  TEST_CASE("batched tape predictions equal row-wise numeric predictions") {
    auto p = make_params(3, 5, 5);
    Rng rng(6);
    const Matrix users = oracle::random_matrix(4, 3, rng);
    const Matrix items = oracle::random_matrix(5, 3, rng);
    const std::vector<std::size_t> u{0, 1, 3, 3};
    const std::vector<std::size_t> v{4, 0, 2, 4};
    ad::Tape tape;
    const Matrix got = predict::predict(tape.constant(users), tape.constant(items), u, v, p).value();
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(got(static_cast<Eigen::Index>(i), 0) ==
            doctest::Approx(predict::predict(users.row(static_cast<Eigen::Index>(u[i])),
                                    items.row(static_cast<Eigen::Index>(v[i])), p))
                .epsilon(1e-14));
    }
  }
}

TEST_SUITE("prediction loss") {
  TEST_CASE("perfect predictions give exactly zero") {
    const std::vector<double> r{1, 2, 5, 4};
    const std::array<bool, 4> mask{true, true, true, true};
    CHECK(prediction_loss(r, r, mask) == 0.0);
    ad::Tape tape;
    CHECK(prediction_loss(tape.constant(Matrix{{1.0}, {2.0}, {5.0}, {4.0}}), r).scalar() == 0.0);
  }

  TEST_CASE("one pair with error 2 gives 2") {
    const std::vector<double> pred{3.0};
    const std::vector<double> truth{5.0};
    const std::array<bool, 1> mask{true};
    CHECK(prediction_loss(pred, truth, mask) == 2.0);
  }

  TEST_CASE("unobserved pairs do not affect the loss") {
    std::vector<double> pred{3.0, 1.0, 4.5};
    const std::vector<double> truth{5.0, 2.0, 4.0};
    const std::array<bool, 3> mask{true, false, true};
    const double base = prediction_loss(pred, truth, mask);
    pred[1] = -1e6;
    CHECK(prediction_loss(pred, truth, mask) == base);
    CHECK(base == doctest::Approx(0.5 * (4.0 + 0.25)));
  }

  TEST_CASE("empty mask is an error") {
    const std::vector<double> v{1.0, 2.0};
    const std::array<bool, 2> none{false, false};
    CHECK_THROWS_AS(prediction_loss(v, v, none), ContractError);
    ad::Tape tape;
    CHECK_THROWS_AS(prediction_loss(tape.constant(Matrix(0, 1)), std::span<const double>{}), ContractError);
  }
}

TEST_SUITE("joint loss") {
  TEST_CASE("zero weights reduce to the prediction loss") {
    CHECK(joint_loss(1.25, 7.0, 9.0, 100.0, {0.0, 0.0, 0.0}) == 1.25);
  }

  TEST_CASE("unit components and weights with zero norm give 3") {
    CHECK(joint_loss(1.0, 1.0, 1.0, 0.0, {1.0, 1.0, 1.0}) == 3.0);
  }

  TEST_CASE("a single weight of value 2 with omega_r 0.1 adds 0.4") {
    ad::Parameter w("w", Matrix::Constant(1, 1, 2.0));
    ad::Parameter* list[] = {&w};
    ad::Tape tape;
    ad::Var norm = squared_norm(tape, list);
    CHECK(norm.scalar() == 4.0);
    ad::Var zero = tape.constant(0.0);
    const double total = joint_loss(zero, zero, zero, norm, {0.0, 0.0, 0.1}).scalar();
    CHECK(total == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(joint_loss(0.0, 0.0, 0.0, 4.0, {0.0, 0.0, 0.1}) == doctest::Approx(0.4).epsilon(1e-15));
  }

  TEST_CASE("tape and scalar forms agree") {
    ad::Tape tape;
    const LossWeights w{0.3, 0.7, 0.01};
    const double got = joint_loss(tape.constant(2.0), tape.constant(0.5), tape.constant(0.25),
                                  tape.constant(9.0), w)
                           .scalar();
    CHECK(got == doctest::Approx(joint_loss(2.0, 0.5, 0.25, 9.0, w)).epsilon(1e-15));
  }
}
