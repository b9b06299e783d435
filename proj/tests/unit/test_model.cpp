#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ssa/errors.hpp"
#include "ssa/model.hpp"

using namespace ssa;

TEST_CASE("build_indicator definition case") {
  const std::vector<Label> labels{0, 1, std::nullopt, 0};
  const auto y = build_indicator(labels, 2);
  Matrix expected(4, 2);
  expected << 1, 0, 0, 1, 0, 0, 1, 0;
  CHECK(y.matrix() == expected);
  CHECK(y.class_counts() == std::vector<Index>{2, 1});
}

TEST_CASE("build_indicator rejects classes without positives and bad ids") {
  const std::vector<Label> none(5, std::nullopt);
  CHECK_THROWS_WITH_AS(build_indicator(none, 2), doctest::Contains("zero positives"), InputError);
  const std::vector<Label> bad{0, 2};
  CHECK_THROWS_AS(build_indicator(bad, 2), InputError);
  const std::vector<Label> negative{0, -1};
  CHECK_THROWS_AS(build_indicator(negative, 2), InputError);
}

TEST_CASE("build_indicator on the 158-person unbalanced layout") {
  // 5 positives per class, 210 background rows: 1000 samples in total.
  std::vector<Label> labels;
  for (int l = 0; l < 158; ++l)
    for (int s = 0; s < 5; ++s) labels.emplace_back(l);
  labels.resize(1000, std::nullopt);
  const auto y = build_indicator(labels, 158);
  CHECK(y.rows() == 1000);
  for (Index l = 0; l < 158; ++l) CHECK(y.column(l).sum() == 5.0);
  for (Index i = 0; i < y.rows(); ++i) CHECK(y.matrix().row(i).sum() <= 1.0);
}

TEST_CASE("DataMatrix rejects empty and non-finite input") {
  CHECK_THROWS_AS(DataMatrix(RowMatrix(0, 3)), InputError);
  RowMatrix m = RowMatrix::Ones(2, 2);
  m(1, 1) = std::nan("");
  CHECK_THROWS_AS(DataMatrix{m}, InputError);
}

TEST_CASE("predict") {
  SUBCASE("zero model") {
    Xoshiro256ss rng(1);
    const DataMatrix x(oracle::gaussian(rng, 5, 3));
    CHECK(predict(x, CoefficientMatrix::zeros(3, 2)).isZero(0.0));
  }
  SUBCASE("identity dictionary") {
    const DataMatrix x(RowMatrix::Identity(2, 2));
    CoefficientMatrix c = CoefficientMatrix::zeros(2, 1);
    c.weights << 3, -1;
    c.biases << 0.5;
    const Matrix s = predict(x, c);
    CHECK(s(0, 0) == doctest::Approx(3.5));
    CHECK(s(1, 0) == doctest::Approx(-0.5));
  }
  SUBCASE("matches the triple-loop oracle") {
    Xoshiro256ss rng(7);
    const RowMatrix xm = oracle::gaussian(rng, 6, 4);
    const CoefficientMatrix c(oracle::gaussian(rng, 4, 3), oracle::gaussian_vector(rng, 3));
    const Matrix got = predict(DataMatrix(xm), c);
    const Matrix want = oracle::predict_loops(xm, c.weights, c.biases);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("dimension mismatch") {
    const DataMatrix x(RowMatrix::Ones(2, 3));
    CHECK_THROWS_AS(predict(x, CoefficientMatrix::zeros(2, 1)), InputError);
  }
}

TEST_CASE("squared_error") {
  const DataMatrix x(RowMatrix::Ones(2, 1));
  CHECK(squared_error(x, Vector::Ones(2), Vector::Zero(1), 0.0) == 2.0);

  Xoshiro256ss rng(3);
  const RowMatrix xm = oracle::gaussian(rng, 9, 4);
  const Vector c = oracle::gaussian_vector(rng, 4);
  const Vector exact = xm * c + Vector::Constant(9, 0.75);
  CHECK(squared_error(DataMatrix(xm), exact, c, 0.75) <= 1e-12);

  const Vector y = oracle::gaussian_vector(rng, 9);
  CHECK(squared_error(DataMatrix(xm), y, c, -0.2) ==
        doctest::Approx(oracle::squared_error_loops(xm, y, c, -0.2)).epsilon(1e-10));
  CHECK_THROWS_AS(squared_error(DataMatrix(xm), Vector::Zero(3), c, 0.0), InputError);
}

TEST_CASE("multitask_loss") {
  Xoshiro256ss rng(11);
  const RowMatrix xm = oracle::gaussian(rng, 8, 5);
  const DataMatrix x(xm);
  const std::vector<Label> labels{0, 1, 2, 0, std::nullopt, 1, 2, 2};
  const auto y = build_indicator(labels, 3);

  SUBCASE("zero model on indicator targets sums to L") {
    CHECK(multitask_loss(x, y, CoefficientMatrix::zeros(5, 3)) == doctest::Approx(3.0));
  }
  SUBCASE("single task reduces to squared error / N_1") {
    const std::vector<Label> one{0, std::nullopt, 0, std::nullopt, 0, 0, std::nullopt, std::nullopt};
    const auto y1 = build_indicator(one, 1);
    const CoefficientMatrix c(oracle::gaussian(rng, 5, 1), Vector::Constant(1, 0.3));
    CHECK(multitask_loss(x, y1, c) ==
          doctest::Approx(squared_error(x, y1.column(0), c.weights.col(0), 0.3) / 4.0).epsilon(1e-14));
  }
  SUBCASE("matches the per-task loop oracle") {
    const CoefficientMatrix c(oracle::gaussian(rng, 5, 3), oracle::gaussian_vector(rng, 3));
    double want = 0.0;
    for (Index l = 0; l < 3; ++l) {
      want += oracle::squared_error_loops(xm, y.column(l), c.weights.col(l), c.biases(l)) /
              static_cast<double>(y.class_counts()[static_cast<std::size_t>(l)]);
    }
    CHECK(std::abs(multitask_loss(x, y, c) - want) <= 1e-10 * std::max(1.0, want));
  }
}

TEST_CASE("row_l0") {
  CHECK(row_l0(Matrix(Matrix::Zero(4, 3))) == 0);
  Vector v(6);
  v << 0, 1.5, 0, -2, 0, 1e-300;
  CHECK(row_l0(Matrix(v)) == 3);
  Matrix c = Matrix::Zero(5, 2);
  c(0, 0) = 1;
  c(3, 1) = 2;
  CHECK(row_l0(c) == 2);

  CoefficientMatrix tiny(c, Vector::Zero(2));
  tiny.weights(4, 0) = 1e-12;
  CHECK(row_l0(tiny) == 3);
  CHECK(row_l0_eps(tiny) == 2);
  CHECK(row_l0_eps(tiny, 1e-13) == 3);
}

TEST_CASE("mixed_norm") {
  CHECK(mixed_norm(Matrix(Matrix::Zero(3, 2)), 1.0, kInfinity) == 0.0);
  Matrix c(3, 2);
  c << 1, -2, 0, 0, 3, 3;
  CHECK(mixed_norm(c, 1.0, kInfinity) == 5.0);

  Xoshiro256ss rng(5);
  const Matrix r = oracle::gaussian(rng, 6, 3);
  double want = 0.0;
  for (Index i = 0; i < 6; ++i) {
    double s = 0.0;
    for (Index j = 0; j < 3; ++j) s += r(i, j) * r(i, j);
    want += std::sqrt(s);
  }
  CHECK(std::abs(mixed_norm(r, 1.0, 2.0) - want) <= 1e-12);

  CHECK_THROWS_AS(mixed_norm(c, 1.5, 2.0), InputError);
  CHECK_THROWS_AS(mixed_norm(c, 0.0, 2.0), InputError);
  CHECK_THROWS_AS(mixed_norm(c, 1.0, 1.0), InputError);
  CHECK(mixed_norm(c, 0.5, kInfinity) == doctest::Approx(std::sqrt(2.0) + std::sqrt(3.0)));
}

TEST_CASE("properties on random instances") {
  Xoshiro256ss rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 3 + static_cast<Index>(rng.below(6));
    const Index d = 1 + static_cast<Index>(rng.below(6));
    const Index tasks = 1 + static_cast<Index>(rng.below(4));
    const RowMatrix xm = oracle::gaussian(rng, n, d);
    const DataMatrix x(xm);
    const CoefficientMatrix c(oracle::gaussian(rng, d, tasks), oracle::gaussian_vector(rng, tasks));
    const Vector y = oracle::gaussian_vector(rng, n);

    // squared_error agrees with the predicted column.
    const Matrix scores = predict(x, c);
    CHECK(std::abs(squared_error(x, y, c.weights.col(0), c.biases(0)) - (y - scores.col(0)).squaredNorm()) <=
          1e-10 * std::max(1.0, y.squaredNorm()));

    // row_l0 bounds.
    CHECK(row_l0(c) <= d);
    CHECK((row_l0(c) == 0) == c.weights.isZero(0.0));

    // p = 1 mixed norm is a norm.
    const Matrix other = oracle::gaussian(rng, d, tasks);
    const double a = rng.uniform(-3.0, 3.0);
    for (double q : {1.5, 2.0, 3.0, kInfinity}) {
      const double lhs = mixed_norm(Matrix(c.weights + other), 1.0, q);
      CHECK(lhs <= mixed_norm(c.weights, 1.0, q) + mixed_norm(other, 1.0, q) + 1e-9);
      CHECK(std::abs(mixed_norm(Matrix(a * other), 1.0, q) - std::abs(a) * mixed_norm(other, 1.0, q)) <= 1e-9);
    }
    // Non-increasing in q.
    double prev = kInfinity;
    for (double q : {1.1, 1.5, 2.0, 4.0, 10.0, kInfinity}) {
      const double v = mixed_norm(c, 1.0, q);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
    // Single column: every q gives the l1 norm.
    const Matrix col = c.weights.col(0);
    for (double q : {1.5, 2.0, kInfinity}) CHECK(mixed_norm(col, 1.0, q) == doctest::Approx(col.cwiseAbs().sum()));
  }
}

TEST_CASE("SupportSet keeps order and rejects duplicates") {
  SupportSet s;
  s.add(4);
  s.add(1);
  CHECK(s.indices() == std::vector<Index>{4, 1});
  CHECK(s.sorted() == std::vector<Index>{1, 4});
  CHECK_THROWS_AS(s.add(4), InputError);
}
