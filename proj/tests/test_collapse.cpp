// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "symlab/collapse.hpp"
#include "symlab/spectral.hpp"

using namespace symlab;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::vector<double> x(dim);
  for (auto& v : x) v = u(rng);
  return x;
}

// d^n/ds^n of sin(js) and cos(js), written out independently of the symbolic calculus
double dsin(int j, int n, double s) { return std::pow(j, n) * std::sin(j * s + n * M_PI / 2); }
double dcos(int j, int n, double s) { return std::pow(j, n) * std::cos(j * s + n * M_PI / 2); }

double direct_wronskian(int k, double s, int first) {
  Eigen::MatrixXd W(2 * k, 2 * k);
  for (int i = 0; i < 2 * k; ++i)
    for (int j = 1; j <= k; ++j) {
      W(i, 2 * (j - 1)) = dsin(j, first + i, s);
      W(i, 2 * (j - 1) + 1) = dcos(j, first + i, s);
    }
  return W.determinant();
}

}  // namespace

TEST(Distribution, GeneratorsAreIsotropic) {
  const auto D = standard_distribution(0, 1);
  ASSERT_EQ(D.fields().size(), 2u);
  EXPECT_TRUE(form_eval(D.ambient(), D.fields()[0], D.fields()[1]).is_zero());
}

TEST(Distribution, FirstBracketHasClosedForm) {
  // X1 = ∂q1 + sin q1 ∂p2, X2 = ∂q2 + sin q1 ∂p1 + cos q1 ∂p2  ⇒  [X1, X2] = cos q1 ∂p1 − sin q1 ∂p2
  const auto D = standard_distribution(0, 1);
  const auto Z = lie_bracket(D.fields()[0], D.fields()[1]);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(rng, 4);
    Eigen::Vector4d want(std::cos(x[1]), 0.0, -std::sin(x[1]), 0.0);
    EXPECT_LT((Z(x) - Eigen::VectorXd(want)).norm(), 1e-14);
  }
}

TEST(Distribution, RankFlagIsTwoThreeFour) {
  const auto D = standard_distribution(0, 1);
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_point(rng, 4);
    EXPECT_EQ(hormander_flag(D, x, 3), (std::vector<int>{2, 3, 4}));
  }
}

TEST(Distribution, RejectsInsufficientHarmonics) {
  EXPECT_THROW(standard_distribution(2, 1), std::invalid_argument);
  EXPECT_THROW(standard_distribution(3, 2), std::invalid_argument);
  EXPECT_NO_THROW(standard_distribution(2, 2));
}

TEST(Distribution, FiberDirectionsAreReachedWithEnoughHarmonics) {
  const auto D = standard_distribution(2, 2);
  std::mt19937_64 rng(11);
  const auto x = random_point(rng, 6);
  const auto flag = hormander_flag(D, x, 5);
  ASSERT_FALSE(flag.empty());
  EXPECT_EQ(flag.back(), 6);
}

TEST(Wronskian, KOneDeterminantHasUnitModulus) {
  const WronskianSystem w(1);
  for (double s : {0.0, 0.4, 1.7, 3.1, 5.9}) EXPECT_NEAR(std::abs(wronskian_matrix(w, s).determinant), 1.0, 1e-13);
}

TEST(Wronskian, MatchesDirectDeterminant) {
  for (int k = 1; k <= 4; ++k) {
    const WronskianSystem w(k);
    for (double s : {0.3, 2.2}) {
      for (int first : {0, 1}) {
        const double want = direct_wronskian(k, s, first);
        EXPECT_NEAR(wronskian_matrix(w, s, first).determinant, want, 1e-9 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST(Wronskian, DeterminantIsConstantInS) {
  // the family solves a constant-coefficient ODE, so Abel's formula makes det W constant
  const WronskianSystem w(3);
  const double d0 = wronskian_matrix(w, 0.0).determinant;
  for (double s : {0.5, 1.5, 4.0}) EXPECT_NEAR(wronskian_matrix(w, s).determinant, d0, 1e-8 * std::abs(d0));
}

TEST(Wronskian, AnnihilatorKillsTheFamily) {
  for (int k = 1; k <= 4; ++k) EXPECT_TRUE(WronskianSystem(k).annihilated());
  EXPECT_FALSE(WronskianSystem::annihilator(TrigPoly::sin_axis(1, 0, 3), 2).is_zero());
}

class DeformedMetricTest : public ::testing::Test {
 protected:
  DeformedMetricTest()
      : D(standard_distribution(0, 1)), split(splitting_from_distribution(euclidean_metric(4), standard_complex(4), D)) {}
  IsotropicDistribution D;
  MetricSplitting split;
};

TEST_F(DeformedMetricTest, ProjectorsDecomposeIdentity) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(rng, 4);
    const auto P = split.at(x);
    EXPECT_LT((P.L + P.JL + P.V - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-13);
    EXPECT_LT((P.L * P.L - P.L).norm(), 1e-13);
    EXPECT_LT((P.L * P.JL).norm(), 1e-13);
  }
  EXPECT_EQ(split.rank_profile(), (std::array<int, 3>{2, 2, 0}));
}

TEST_F(DeformedMetricTest, UnitParameterIsTheOriginalMetric) {
  const std::vector<double> x{0.2, 1.3, 2.4, 3.5};
  EXPECT_LT((DeformedMetric(split, 1.0)(x) - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-13);
}

TEST_F(DeformedMetricTest, VolumeIsPreservedAndStructureStaysCompatible) {
  std::mt19937_64 rng(13);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(4, 4);
  omega(0, 1) = 1; omega(1, 0) = -1; omega(2, 3) = 1; omega(3, 2) = -1;
  for (double t : {0.5, 2.0, 8.0}) {
    const DeformedMetric gt(split, t);
    const auto x = random_point(rng, 4);
    const Eigen::MatrixXd g = gt(x);
    EXPECT_NEAR(g.determinant(), 1.0, 1e-11);
    const Eigen::MatrixXd J = gt.complex_structure(x);
    EXPECT_LT((J * J + Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-11);
    EXPECT_LT((compatible_metric_at(omega, J) - g).norm(), 1e-11);
  }
}

TEST_F(DeformedMetricTest, GeneratorsShrinkAsOneOverT) {
  const std::vector<double> x{0.7, 0.3, 1.1, 2.9};
  const Eigen::VectorXd X1 = D.fields()[0](x);
  const double base = X1.squaredNorm();
  for (double t : {2.0, 4.0}) EXPECT_NEAR(X1.dot(DeformedMetric(split, t)(x) * X1), base / t, 1e-12);
}

TEST_F(DeformedMetricTest, RejectsNonPositiveParameter) {
  EXPECT_THROW(DeformedMetric(split, 0.0), std::invalid_argument);
}

TEST_F(DeformedMetricTest, SweepRefusesUnresolvableParameter) {
  const auto grid = UniformGrid::torus(4, 8);
  CollapseOptions opt;
  opt.anisotropy_limit = 4.0;
  // 8 cells: h = π/4, top frequency 1, so t = 8 gives ratio 2π > 4
  EXPECT_THROW(collapse_sweep(split, grid, {1.0, 8.0}, opt), ResolutionError);
  EXPECT_THROW(collapse_sweep(split, grid, {2.0, 1.0}, opt), std::invalid_argument);
}

TEST(GrowthExponent, RecoversPowerLaw) {
  std::vector<CollapseRow> rows;
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    CollapseRow r;
    r.t = t;
    r.lambda1 = 3.0 * std::pow(t, 0.75);
    rows.push_back(r);
  }
  const auto g = growth_exponent(rows);
  EXPECT_NEAR(g.least_squares, 0.75, 1e-12);
  EXPECT_NEAR(g.terminal, 0.75, 1e-12);
}

TEST(CosineModeQuotient, FlatMetricGivesOne) {
  auto flat = [](std::span<const double>) { return Eigen::MatrixXd(Eigen::MatrixXd::Identity(4, 4)); };
  EXPECT_NEAR(cosine_mode_rayleigh_quotient(flat, 4, 0, 1), 1.0, 1e-14);
  EXPECT_THROW(cosine_mode_rayleigh_quotient(flat, 4, 1, 1), std::invalid_argument);
}

TEST(CosineModeQuotient, MatchesClosedFormForDiagonalMetric) {
  // g = diag(a(y), 1) with a = 2 + sin y: g^{xx}√det = 1/√a, √det = √a
  auto g = [](std::span<const double> x) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(0, 0) = 2.0 + std::sin(x[1]);
    return m;
  };
  double num = 0, den = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double y = 2 * M_PI * (i + 0.5) / n, a = 2.0 + std::sin(y);
    num += 1.0 / std::sqrt(a);
    den += std::sqrt(a);
  }
  EXPECT_NEAR(cosine_mode_rayleigh_quotient(g, 2, 0, 1), num / den, 1e-12);
}
