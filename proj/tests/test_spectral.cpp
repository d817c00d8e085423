// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "symlab/collapse.hpp"
#include "symlab/fiber.hpp"
#include "symlab/spectral.hpp"

using namespace symlab;

namespace {

auto identity_metric(std::size_t dim) {
  return [dim](std::span<const double>) { return Eigen::MatrixXd(Eigen::MatrixXd::Identity(dim, dim)); };
}

// eigenvalue of the 3-point difference Laplacian for the mode e^{ix} on n cells of length 2π
double discrete_mode(int n) {
  const double h = 2.0 * M_PI / n;
  return 4.0 * std::sin(h / 2) * std::sin(h / 2) / (h * h);
}

}  // namespace

TEST(Grid, PeriodicAxisWrapsAndCellCentredAxisReflects) {
  UniformGrid g({GridAxis{4, 1.0, false, true}, GridAxis{4, 1.0, true}});
  EXPECT_EQ(g.node_count(), 16u);
  EXPECT_NEAR(g.axis(0).coordinate(0), 0.125, 1e-15);
  EXPECT_NEAR(g.axis(1).coordinate(3), 0.75, 1e-15);
  EXPECT_THROW(UniformGrid({GridAxis{4, 1.0, true, true}}), std::invalid_argument);
}

TEST(Grid, ClosedAxisHasHalfWeightEnds) {
  UniformGrid g({GridAxis{4, 1.0, false}});
  EXPECT_EQ(g.node_count(), 5u);
  double total = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n) total += g.node_weight(n);
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_NEAR(g.node_weight(0), 0.125, 1e-15);
}

TEST(FlatSpectrum, ClosedFormListsLatticeNorms) {
  const auto s = flat_torus_spectrum(2, 10);
  const std::vector<double> want{0, 1, 1, 1, 1, 2, 2, 2, 2, 4};
  EXPECT_EQ(s, want);
}

TEST(Laplacian, FlatTorusMatchesDiscreteSymbol) {
  for (int n : {8, 16, 32}) {
    const auto r = laplace_beltrami_spectrum(identity_metric(2), UniformGrid::torus(2, n), 6);
    EXPECT_NEAR(r.lambda1(), discrete_mode(n), 1e-9);
    EXPECT_NEAR(r.eigenvalues[4], discrete_mode(n), 1e-9);
    EXPECT_NEAR(r.eigenvalues[0], 0.0, 1e-10);
  }
}

TEST(Laplacian, ConvergesAtSecondOrder) {
  double prev = std::abs(laplace_beltrami_spectrum(identity_metric(2), UniformGrid::torus(2, 8), 2).lambda1() - 1.0);
  for (int n : {16, 32}) {
    const double err = std::abs(laplace_beltrami_spectrum(identity_metric(2), UniformGrid::torus(2, n), 2).lambda1() - 1.0);
    EXPECT_GE(prev / err, 3.5);
    prev = err;
  }
}

TEST(Laplacian, ScalingTheMetricScalesEigenvaluesInversely) {
  auto g3 = [](std::span<const double>) { return Eigen::MatrixXd(3.0 * Eigen::MatrixXd::Identity(2, 2)); };
  const auto grid = UniformGrid::torus(2, 16);
  EXPECT_NEAR(laplace_beltrami_spectrum(g3, grid, 2).lambda1(), discrete_mode(16) / 3.0, 1e-9);
}

TEST(Laplacian, IterativeSolverAgreesWithDenseReference) {
  auto g = [](std::span<const double> x) {
    Eigen::MatrixXd m(2, 2);
    m << 1.5 + 0.5 * std::sin(x[0]), 0.3 * std::cos(x[1]), 0.3 * std::cos(x[1]), 1.0 + 0.4 * std::cos(x[0] + x[1]);
    return m;
  };
  const auto grid = UniformGrid::torus(2, 10);
  const auto [A, M] = assemble_laplace_beltrami(g, grid);
  const Eigen::VectorXd dense = dense_generalized_spectrum(A, M);
  const auto r = laplace_beltrami_spectrum(g, grid, 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.eigenvalues[i], dense[i], 1e-7 * std::max(1.0, dense[i]));
  EXPECT_TRUE(r.converged);
}

TEST(Laplacian, OperatorIsSymmetricAndAnnihilatesConstants) {
  auto g = [](std::span<const double> x) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(0, 0) = 2.0 + std::sin(x[1]);
    return m;
  };
  const auto [A, M] = assemble_laplace_beltrami(g, UniformGrid::torus(2, 12));
  const SparseMatrix At = A.matrix.transpose();
  EXPECT_LT((A.matrix - At).norm(), 1e-12);
  EXPECT_LT((A.matrix * Eigen::VectorXd::Ones(A.matrix.rows())).norm(), 1e-12);
}

TEST(Laplacian, RayleighQuotientsNeverUndercutLambdaOne) {
  auto g = [](std::span<const double> x) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(1, 1) = 1.0 + 0.5 * std::cos(x[0]);
    return m;
  };
  const auto grid = UniformGrid::torus(2, 12);
  const auto [A, M] = assemble_laplace_beltrami(g, grid);
  const auto r = laplace_beltrami_spectrum(g, grid, 2);
  const double l1 = r.lambda1();
  EXPECT_NEAR(rayleigh_quotient(A, M, r.eigenvectors.col(1)), l1, 1e-8);
  // 50 random vectors pushed downhill by gradient descent on the Rayleigh quotient; the step is
  // below 2 / lambda_max so each iterate is a strict descent, and none may fall under lambda1
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  const Eigen::VectorXd& w = M.weights;
  const double step = 1.0 / dense_generalized_spectrum(A, M).maxCoeff();
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd f(A.matrix.rows());
    for (auto& v : f) v = nd(rng);
    f.array() -= f.dot(w) / M.total();
    double prev = rayleigh_quotient(A, M, f);
    for (int it = 0; it < 200; ++it) {
      const double rq = rayleigh_quotient(A, M, f);
      Eigen::VectorXd grad = (A.matrix * f - rq * w.cwiseProduct(f)).cwiseQuotient(w);
      f -= step * grad;
      f.array() -= f.dot(w) / M.total();
    }
    const double rq = rayleigh_quotient(A, M, f);
    EXPECT_LE(rq, prev + 1e-12);
    EXPECT_GE(rq, l1 - 1e-8);
  }
}

TEST(Laplacian, IndefiniteMetricIsRejected) {
  auto bad = [](std::span<const double>) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(1, 1) = -1.0;
    return m;
  };
  EXPECT_THROW(assemble_laplace_beltrami(bad, UniformGrid::torus(2, 8)), IndefiniteMetric);
}

TEST(Laplacian, UnderResolvedFrequencyIsRejected) {
  EXPECT_THROW(require_resolution(UniformGrid::torus(2, 6), 3), ResolutionError);
  EXPECT_NO_THROW(require_resolution(UniformGrid::torus(2, 8), 3));
}

TEST(Laplacian, CellCentredAxisGivesNeumannSpectrum) {
  // x ∈ [0, π] with reflecting ends and y periodic of length 2π: the lowest nonzero mode is cos x or e^{iy}
  UniformGrid g({GridAxis{32, M_PI, false, true}, GridAxis{32, 2 * M_PI, true}});
  const auto r = laplace_beltrami_spectrum(identity_metric(2), g, 4);
  const double hx = M_PI / 32;
  const double mode_x = 4.0 * std::sin(hx / 2) * std::sin(hx / 2) / (hx * hx);
  EXPECT_NEAR(r.lambda1(), std::min(mode_x, discrete_mode(32)), 1e-9);
}

TEST(SubLaplacian, CoordinateFieldsReproduceFlatLaplacian) {
  const auto grid = UniformGrid::torus(2, 16);
  const auto r = sub_laplacian_spectrum({VectorField::coordinate(2, 0), VectorField::coordinate(2, 1)}, grid, 2);
  EXPECT_NEAR(r.lambda1(), discrete_mode(16), 1e-9);
}

TEST(SubLaplacian, SingleFieldHasNoGap) {
  const auto grid = UniformGrid::torus(2, 8);
  const auto r = sub_laplacian_spectrum({VectorField::coordinate(2, 0)}, grid, 2);
  EXPECT_NEAR(r.lambda1(), 0.0, 1e-8);
}

TEST(SphereLaplacian, UnitSphereFirstEigenvalueIsTwo) {
  const auto [A, M] = sphere_laplacian(32, 64);
  const auto r = lowest_eigenpairs(A, M, 4);
  EXPECT_NEAR(r.lambda1(), 2.0, 0.02);
  EXPECT_NEAR(r.eigenvalues[3], 2.0, 0.02);  // multiplicity three
  EXPECT_NEAR(M.total(), 4.0 * M_PI, 1e-10);
}

TEST(TripletExport, ListsEveryStoredEntry) {
  const auto [A, M] = assemble_laplace_beltrami(identity_metric(2), UniformGrid::torus(2, 4));
  std::ostringstream os;
  write_triplets(os, A);
  std::istringstream is(os.str());
  int rows = 0, r, c;
  double v, sum = 0.0;
  while (is >> r >> c >> v) {
    ++rows;
    sum += v;
  }
  EXPECT_EQ(rows, A.matrix.nonZeros());
  EXPECT_NEAR(sum, 0.0, 1e-12);
}
