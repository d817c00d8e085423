// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "symlab/tensor_fields.hpp"
#include "symlab/trig_poly.hpp"

using namespace symlab;

namespace {

TrigPoly random_poly(std::mt19937_64& rng, std::size_t dim, int maxf, int terms) {
  std::uniform_int_distribution<int> f(-maxf, maxf);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  TrigPoly p(dim);
  for (int t = 0; t < terms; ++t) {
    Frequency k(dim);
    for (auto& v : k) v = f(rng);
    p.add_term(k, c(rng), c(rng));
  }
  return p;
}

VectorField random_field(std::mt19937_64& rng, std::size_t dim) {
  std::vector<TrigPoly> comps;
  for (std::size_t i = 0; i < dim; ++i) comps.push_back(random_poly(rng, dim, 2, 3));
  return VectorField(comps);
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::vector<double> x(dim);
  for (auto& v : x) v = u(rng);
  return x;
}

// central difference of a scalar function along one axis
template <class Fn>
double fd(Fn&& f, std::vector<double> x, std::size_t axis, double h = 1e-5) {
  x[axis] += h;
  const double a = f(x);
  x[axis] -= 2 * h;
  return (a - f(x)) / (2 * h);
}

}  // namespace

TEST(TrigPoly, EvaluatesClosedForm) {
  TrigPoly p(2);
  p.add_term({1, 2}, 0.5, -1.5);
  p.add_term({0, 0}, 2.0, 0.0);
  const std::vector<double> x{0.3, 1.1};
  EXPECT_NEAR(p(x), 2.0 + 0.5 * std::cos(0.3 + 2.2) - 1.5 * std::sin(0.3 + 2.2), 1e-15);
}

TEST(TrigPoly, NegativeFrequenciesFoldToCanonicalForm) {
  TrigPoly a(2), b(2);
  a.add_term({-1, 3}, 0.7, 0.4);
  b.add_term({1, -3}, 0.7, -0.4);
  EXPECT_TRUE(a == b);
  const std::vector<double> x{0.9, -2.0};
  EXPECT_NEAR(a(x), 0.7 * std::cos(-0.9 - 6.0) + 0.4 * std::sin(-0.9 - 6.0), 1e-14);
}

TEST(TrigPoly, CancellationLeavesExactZero) {
  const auto s = TrigPoly::sin_axis(3, 1, 2);
  EXPECT_TRUE((s - s).is_zero());
  EXPECT_TRUE((0.0 * s).is_zero());
}

TEST(TrigPoly, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(rng, 4, 3, 5);
    const auto x = random_point(rng, 4);
    for (std::size_t ax = 0; ax < 4; ++ax)
      EXPECT_NEAR(p.derive(ax)(x), fd([&](const std::vector<double>& y) { return p(y); }, x, ax), 1e-7);
  }
}

TEST(TrigPoly, ProductIsPointwise) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_poly(rng, 3, 3, 4), b = random_poly(rng, 3, 3, 4);
    const auto x = random_point(rng, 3);
    EXPECT_NEAR((a * b)(x), a(x) * b(x), 1e-12);
  }
}

TEST(TrigPoly, MeanIsTheZeroModeIntegral) {
  TrigPoly p = TrigPoly::constant(2, 1.25) + TrigPoly::cos_axis(2, 0) * TrigPoly::cos_axis(2, 0);
  // cos² has mean 1/2; a direct midpoint sum is exact for trigonometric polynomials of low degree
  double sum = 0.0;
  const int n = 16;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sum += p(std::vector<double>{2 * M_PI * (i + 0.5) / n, 2 * M_PI * (j + 0.5) / n});
  EXPECT_NEAR(p.mean(), sum / (n * n), 1e-14);
  EXPECT_NEAR(p.without_mean().mean(), 0.0, 1e-15);
}

TEST(TrigPoly, DimensionMismatchThrows) {
  EXPECT_THROW(TrigPoly::constant(2, 1.0) + TrigPoly::constant(3, 1.0), DimensionError);
}

TEST(LieBracket, MatchesDirectionalDerivativeOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto X = random_field(rng, 4), Y = random_field(rng, 4);
    const auto Z = lie_bracket(X, Y);
    const auto x = random_point(rng, 4);
    // [X,Y]^i = X(Y^i) − Y(X^i) via finite differences of the components
    for (std::size_t i = 0; i < 4; ++i) {
      double want = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        want += X[j](x) * fd([&](const std::vector<double>& y) { return Y[i](y); }, x, j);
        want -= Y[j](x) * fd([&](const std::vector<double>& y) { return X[i](y); }, x, j);
      }
      EXPECT_NEAR(Z[i](x), want, 1e-6);
    }
  }
}

TEST(LieBracket, AntisymmetryAndJacobiAreExact) {
  std::mt19937_64 rng(4);
  const auto X = random_field(rng, 2), Y = random_field(rng, 2), W = random_field(rng, 2);
  const auto anti = lie_bracket(X, Y) + lie_bracket(Y, X);
  for (const auto& c : anti.components()) EXPECT_LT(c.is_zero() ? 0.0 : max_coeff_diff(c, TrigPoly(2)), 1e-12);
  const auto jac = lie_bracket(X, lie_bracket(Y, W)) + lie_bracket(Y, lie_bracket(W, X)) + lie_bracket(W, lie_bracket(X, Y));
  for (const auto& c : jac.components()) EXPECT_LT(max_coeff_diff(c, TrigPoly(2)), 1e-10);
}

TEST(LieBracket, CoordinateFieldsCommute) {
  EXPECT_TRUE(lie_bracket(VectorField::coordinate(4, 0), VectorField::coordinate(4, 3)).is_zero());
}

TEST(CompatibleMetric, StandardPairGivesEuclidean) {
  const auto g = compatible_metric(standard_symplectic(4), standard_complex(4));
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  EXPECT_LT((g(x) - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-15);
}

TEST(CompatibleMetric, RejectsReversedComplexStructure) {
  PolyMatrix m = standard_complex(4).entries();
  PolyMatrix neg(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) neg(i, j) = -1.0 * m(i, j);
  EXPECT_THROW(compatible_metric(standard_symplectic(4), EndomorphismField(neg)), IncompatibleStructure);
}

TEST(CompatibleMetric, RejectsNonComplexEndomorphism) {
  EXPECT_THROW(compatible_metric(standard_symplectic(2), EndomorphismField(PolyMatrix::from_constant(Eigen::Matrix2d::Identity()))),
               IncompatibleStructure);
}

TEST(CompatibleMetric, PointwiseVariantAgreesWithSymbolic) {
  Eigen::Matrix4d w = Eigen::Matrix4d::Zero(), J = Eigen::Matrix4d::Zero();
  w(0, 1) = 1; w(1, 0) = -1; w(2, 3) = 1; w(3, 2) = -1;
  J(1, 0) = 1; J(0, 1) = -1; J(3, 2) = 1; J(2, 3) = -1;
  EXPECT_LT((compatible_metric_at(w, J) - Eigen::Matrix4d::Identity()).norm(), 1e-15);
  EXPECT_THROW(compatible_metric_at(w, -J), IncompatibleStructure);
}

TEST(FormEval, SymplecticPairingOfCoordinateFields) {
  const auto w = standard_symplectic(4);
  EXPECT_NEAR(form_eval(w, VectorField::coordinate(4, 0), VectorField::coordinate(4, 1)).mean(), 1.0, 1e-15);
  EXPECT_TRUE(form_eval(w, VectorField::coordinate(4, 0), VectorField::coordinate(4, 2)).is_zero());
}
