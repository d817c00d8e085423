// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "symlab/experiments.hpp"

using namespace symlab;

namespace {

const double pi = std::acos(-1.0);

Eigen::Vector3d rotate_z(const Eigen::Vector3d& r, double angle) {
  return Eigen::Vector3d(std::cos(angle) * r.x() - std::sin(angle) * r.y(),
                         std::sin(angle) * r.x() + std::cos(angle) * r.y(), r.z());
}

// fiber mean of a scalar function on the unit-period torus by the midpoint rule
template <class Fn>
double torus_mean(Fn&& f, int n = 64) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += f(Eigen::Vector2d((i + 0.5) / n, (j + 0.5) / n));
  return s / (n * n);
}

}  // namespace

TEST(TorusFiber, SymplecticGradientRoutesAgree) {
  std::mt19937_64 rng(31);
  TorusFiber f(2.5);
  for (int i = 0; i < 20; ++i) {
    const auto H = TorusFiber::random_hamiltonian(rng, 3);
    const auto z = TorusFiber::random_point(rng);
    EXPECT_LT((f.sgrad(H, z) - f.sgrad_reference(H, z)).norm(), 1e-12);
  }
}

TEST(TorusFiber, BracketIsOmegaOfSymplecticGradients) {
  std::mt19937_64 rng(32);
  const double A = 1.7;
  TorusFiber f(A);
  const auto H = TorusFiber::random_hamiltonian(rng, 2), G = TorusFiber::random_hamiltonian(rng, 2);
  const auto B = f.bracket(H, G);
  auto omega = [&](const Eigen::Vector2d& z) {
    const auto X = f.sgrad(H, z), Y = f.sgrad(G, z);
    return A * (X[0] * Y[1] - X[1] * Y[0]);
  };
  const double mean = torus_mean(omega);
  for (int i = 0; i < 10; ++i) {
    const auto z = TorusFiber::random_point(rng);
    EXPECT_NEAR(TorusFiber::eval(B, z), omega(z) - mean, 1e-10);
  }
}

TEST(SphereFiber, HeightGeneratesRotationAboutTheAxis) {
  SphereFiber f(4.0 * pi);  // c = 1
  const Eigen::Vector3d r = Eigen::Vector3d(0.3, -0.4, 0.5).normalized();
  EXPECT_LT((f.sgrad(SphereFiber::height(), r) - Eigen::Vector3d(-r.y(), r.x(), 0.0)).norm(), 1e-15);
  EXPECT_LT((f.sgrad(SphereFiber::height(), r) - f.sgrad_reference(SphereFiber::height(), r)).norm(), 1e-12);
}

TEST(SphereFiber, SymplecticGradientRoutesAgreeAwayFromPoles) {
  std::mt19937_64 rng(33);
  SphereFiber f(1.0);
  for (int i = 0; i < 20; ++i) {
    const auto H = SphereFiber::random_hamiltonian(rng, 3);
    auto r = SphereFiber::random_point(rng);
    if (std::hypot(r.x(), r.y()) < 0.05) continue;
    EXPECT_LT((f.sgrad(H, r) - f.sgrad_reference(H, r)).norm(), 1e-10 * (1.0 + f.sgrad(H, r).norm()));
  }
}

TEST(SphereFiber, QuadratureIntegratesPolynomialsExactly) {
  SphereFiber f(3.0);
  const auto q = f.quadrature(8);
  double area = 0.0, z2 = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    area += q.area_weights[k];
    z2 += q.area_weights[k] * q.points[k].z() * q.points[k].z();
  }
  EXPECT_NEAR(area, 3.0, 1e-12);
  EXPECT_NEAR(z2, 1.0, 1e-12);  // ∫ z² dA = A/3
}

TEST(Profile, RampEndpointsAndDensityMass) {
  const auto r = Profile1D::ramp(0.1);
  EXPECT_NEAR(r(0.0), 0.0, 1e-15);
  EXPECT_NEAR(r(1.0), 1.0, 1e-15);
  EXPECT_NEAR(r(0.5), 0.5, 1e-12);
  const auto d = Profile1D::density(0.1);
  double mass = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) mass += d((i + 0.5) / n) / n;
  EXPECT_NEAR(mass, 1.0, 1e-8);
  EXPECT_NEAR(d(0.5), 1.0 / 0.9, 1e-12);
  EXPECT_THROW(Profile1D::ramp(0.6), std::invalid_argument);
}

TEST(Profile, DerivativeMatchesFiniteDifference) {
  for (const auto& p : {Profile1D::ramp(0.2), Profile1D::bump(), Profile1D::sine(3)}) {
    for (double x : {0.07, 0.3, 0.55, 0.91}) {
      const double h = 1e-6;
      EXPECT_NEAR(p.derivative()(x), (p(x + h) - p(x - h)) / (2 * h), 1e-6);
    }
  }
}

TEST(Connection, RejectsHamiltoniansWithNonzeroMean) {
  SeparableField<TorusFiber> b;
  b.add({1.0, {Profile1D::bump()}, {}, TrigPoly::constant(2, 1.0)});
  EXPECT_THROW(Connection<TorusFiber>(TorusFiber(1.0), {}, b), std::invalid_argument);
}

TEST(Curvature, MatchesFiniteDifferenceOracle) {
  const auto nu = nonabelian_test_connection(1.3);
  const auto L = curvature(nu);
  const double A = nu.fiber().area();
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 5; ++i) {
    const double x = u(rng), y = u(rng);
    auto pointwise = [&](const Eigen::Vector2d& z) {
      const double h = 1e-5;
      const double dxb = (nu.b()(x + h, y, z) - nu.b()(x - h, y, z)) / (2 * h);
      const double dya = (nu.a()(x, y + h, z) - nu.a()(x, y - h, z)) / (2 * h);
      const auto X = nu.lift_x(x, y, z), Y = nu.lift_y(x, y, z);
      return dxb - dya + A * (X[0] * Y[1] - X[1] * Y[0]);
    };
    const double mean = torus_mean(pointwise, 48);
    const Eigen::Vector2d z(u(rng), u(rng));
    EXPECT_NEAR(L(x, y, z), pointwise(z) - mean, 1e-7);
  }
}

TEST(Curvature, HasFiberMeanZero) {
  const auto nu = nonabelian_test_connection();
  EXPECT_LT(curvature_mean_defect(curvature(nu), nu.fiber()), 1e-12);
}

TEST(Curvature, OrientationFlipNegatesAndReflects) {
  const auto nu = nonabelian_test_connection();
  const auto L = curvature(nu), Lf = curvature(orientation_flip(nu));
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng), y = u(rng);
    const Eigen::Vector2d z(u(rng), u(rng));
    EXPECT_NEAR(Lf(1.0 - x, y, z), -L(x, y, z), 1e-12);
  }
}

TEST(Holonomy, AbelianRotationHasClosedForm) {
  SphereFiber f(1.0);
  const double eps = 0.05;
  const auto nu = abelian_rotation_connection(f, eps);
  const auto beta = Profile1D::ramp(eps);
  const Eigen::Vector3d r = Eigen::Vector3d(0.6, 0.1, 0.7).normalized();
  for (double s : {0.0, 0.2, 0.5, 0.83, 1.0}) {
    IntegratorOptions opt;
    opt.tol = 1e-12;
    const auto tr = holonomy_map(nu, s, r, opt);
    EXPECT_LT((tr.end - rotate_z(r, 2.0 * pi * beta(s))).norm(), 1e-9) << "s = " << s;
  }
}

TEST(Holonomy, RotationConnectionsAreBoundaryTrivial) {
  SphereFiber f(1.0);
  EXPECT_TRUE(boundary_triviality(rotation_connection(f, 0.05)).trivial(1e-8));
  EXPECT_TRUE(boundary_triviality(nonabelian_test_connection()).trivial(1e-8));
}

TEST(Holonomy, NonTrivialBoundaryIsDetected) {
  SeparableField<TorusFiber> b;
  b.add({0.3, {Profile1D::constant()}, {Profile1D::bump()}, TorusFiber::cos_p()});
  const Connection<TorusFiber> nu(TorusFiber(1.0), {}, b);
  EXPECT_FALSE(boundary_triviality(nu).trivial(1e-8));
}

TEST(Holonomy, GeneratorOfAbelianLoopIsItsCurvatureIntegral) {
  // for b = β(x) z/2 the generating Hamiltonian at s is β'(s) z/2, so length₊ = max L = max β'/2
  SphereFiber f(1.0);
  const double eps = 0.05;
  const auto nu = abelian_rotation_connection(f, eps);
  const auto L = curvature(nu);
  const double s = 0.5;
  const auto F = holonomy_hamiltonian(nu, L, {s}, 8, {}, {{0, 0, 1}, {0, 0, -1}});
  const double want = Profile1D::density(eps)(s) * 0.5;
  EXPECT_NEAR(hofer_lengths(F).plus, want, 1e-9);
  EXPECT_NEAR(hofer_lengths(F).minus, want, 1e-9);
}

TEST(Holonomy, FormulaMatchesFlowForNonabelianConnection) {
  const auto nu = nonabelian_test_connection();
  const auto L = curvature(nu);
  const auto cmp = formula_vs_flow(nu, L, {0.4}, {Eigen::Vector2d(0.3, 0.6)}, 1.0 / 128);
  EXPECT_LT(cmp.sup_error, 1e-2);
}

TEST(Holonomy, HoferLengthsOfSampledLoop) {
  SampledLoop<TorusFiber> F;
  F.values = {{0.5, -0.2, 0.1}, {0.3, -0.7, 0.0}};
  const auto h = hofer_lengths(F);
  EXPECT_DOUBLE_EQ(h.plus, 0.5);
  EXPECT_DOUBLE_EQ(h.minus, 0.7);
  EXPECT_DOUBLE_EQ(h.length, 0.7);
}

TEST(Holonomy, RotationLoopLengths) {
  SphereFiber f(1.0);
  const double eps = 0.1;
  const auto h = hofer_lengths(rotation_loop(eps), f);
  EXPECT_NEAR(h.plus, 0.5 / (1.0 - eps), 1e-9);
  EXPECT_NEAR(h.minus, 0.5 / (1.0 - eps), 1e-9);
}

TEST(Holonomy, LoopWithoutFlatEndsIsRejected) {
  HamiltonianLoop<SphereFiber> F;
  F.terms.emplace_back(Profile1D::constant(), SphereFiber::height(0.5));
  EXPECT_THROW(connection_from_loop(SphereFiber(1.0), F, Profile1D::ramp(0.1)), BoundaryError);
}

TEST(Coupling, PfaffianAndWedgeOfStandardForm) {
  Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
  w(0, 1) = 2; w(1, 0) = -2; w(2, 3) = 3; w(3, 2) = -3;
  EXPECT_NEAR(pfaffian4(w), 6.0, 1e-15);
  EXPECT_NEAR(w.determinant(), 36.0, 1e-12);
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  // (w ∧ w)(e1, e2, e3, e4) = 2 Pf(w)
  EXPECT_NEAR(wedge4(w, w, I.col(0), I.col(1), I.col(2), I.col(3)), 12.0, 1e-12);
}

TEST(Coupling, FiberIntegralOfCouplingSquareVanishes) {
  const auto nu = nonabelian_test_connection();
  EXPECT_LT(coupling_fi_defect(nu, curvature(nu)), 1e-10);
}

TEST(Coupling, VolumeIdentityAndRejection) {
  SphereFiber f(1.0);
  const auto nu = rotation_connection(f, 0.05);
  const auto L = curvature(nu);
  const auto ext = curvature_extrema(L, f);
  const auto tf = total_form(nu, L, ext, 0.5 / ext.max);
  EXPECT_NEAR(tf.s, 0.5 / ext.max, 1e-8);
  EXPECT_GT(tf.min_factor, 0.0);
  try {
    total_form(nu, L, ext, 1.05 / ext.max);
    FAIL() << "expected a degeneracy certificate";
  } catch (const DegenerateForm& e) {
    EXPECT_LE(e.certificate().factor, 0.0);
  }
}

TEST(Coupling, SizeLowerBoundConventions) {
  Extrema e;
  e.max = 0.25;
  e.min = -0.5;
  EXPECT_DOUBLE_EQ(size_lower_bound(e).value, 4.0);
  e.max = -0.1;
  EXPECT_TRUE(size_lower_bound(e).unbounded);
}

TEST(QuasiKahler, BaseChartIsUnitAreaRoundSphere) {
  for (double x : {0.1, 0.5, 0.77}) {
    const Eigen::Matrix2d h = round_sphere_base_metric(x, 0.3);
    EXPECT_NEAR(h.determinant(), 1.0, 1e-12);
    const Eigen::Matrix2d j = base_complex_structure(h);
    EXPECT_LT((j * j + Eigen::Matrix2d::Identity()).norm(), 1e-12);
  }
}

TEST(QuasiKahler, MetricIsCompatibleAndRestrictsToFiber) {
  const auto nu = sphere_chart_connection(0.1);
  const auto ext = curvature_extrema(curvature(nu), nu.fiber());
  const QuasiKahlerMetric<TorusFiber> g(nu, 0.5 / ext.max);
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 10; ++i) {
    const double x = u(rng), y = u(rng);
    const Eigen::Vector2d z(u(rng), u(rng));
    const Eigen::Matrix4d m = g.at(x, y, z);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(m).eigenvalues().minCoeff(), 0.0);
    EXPECT_LT((m - g.via_structures(x, y, z)).norm(), 1e-12 * m.norm());
    EXPECT_LT((m.bottomRightCorner<2, 2>() - nu.fiber().metric_chart(z)).norm(), 1e-13);
  }
  // past u = 1 / max L the form degenerates where the curvature peaks
  const QuasiKahlerMetric<TorusFiber> bad(nu, 1.5 / ext.max);
  const Eigen::Vector4d& p = ext.argmax;
  EXPECT_THROW(bad.at(p[0], p[1], TorusFiber::from_chart(Eigen::Vector2d(p[2], p[3]))), DegenerateForm);
}

TEST(RandomConnections, AreBoundaryTrivialAndSeeded) {
  std::mt19937_64 a(99), b(99);
  TorusFiber f(1.0);
  const auto c1 = random_connection(f, a, 0.1, 2), c2 = random_connection(f, b, 0.1, 2);
  const Eigen::Vector2d z(0.2, 0.7);
  EXPECT_EQ(c1.b()(0.3, 0.4, z), c2.b()(0.3, 0.4, z));
  EXPECT_LT(boundary_triviality(c1).tangential, 1e-12);
}
