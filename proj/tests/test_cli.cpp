// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "config_io.hpp"

using namespace symlab;
using namespace symlab::cli;

TEST(Config, EmptyObjectGivesDefaults) {
  const auto f = parse_config(json::object());
  EXPECT_EQ(f.suite.collapse.ts, (std::vector<double>{1, 2, 4, 8}));
  EXPECT_EQ(f.suite.flat.t4_grid, 16);
  EXPECT_NO_THROW(validate_all(f.suite));
}

TEST(Config, SectionsOverrideFields) {
  const auto f = parse_config(json::parse(R"({"seed": 5, "collapse": {"grid": 8, "ts": [1, 2]},
                                              "size": {"perturbations": 3}})"));
  EXPECT_EQ(f.suite.seed, 5u);
  EXPECT_EQ(f.suite.collapse.grid, 8);
  EXPECT_EQ(f.suite.collapse.ts, (std::vector<double>{1, 2}));
  EXPECT_EQ(f.suite.size.perturbations, 3);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(parse_config(json::parse(R"({"colapse": {}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"collapse": {"grids": 8}})")), ConfigError);
}

TEST(Config, WrongTypesAreRejected) {
  EXPECT_THROW(parse_config(json::parse(R"({"collapse": {"grid": "big"}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"seed": -3})")), ConfigError);
}

TEST(Config, InvalidValuesFailValidationBeforeCompute) {
  auto f = parse_config(json::parse(R"({"collapse": {"ts": [2, 4]}})"));
  EXPECT_THROW(validate_all(f.suite), ConfigError);
  f = parse_config(json::parse(R"({"flat": {"t2_grids": [16, 24]}})"));
  EXPECT_THROW(validate_all(f.suite), ConfigError);
  f = parse_config(json::parse(R"({"holonomy": {"base_steps": [0.01, 0.02]}})"));
  EXPECT_THROW(validate_all(f.suite), ConfigError);
  f = parse_config(json::parse(R"({"size": {"reject_fraction": 0.9}})"));
  EXPECT_THROW(validate_all(f.suite), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  const auto f = parse_config(json::parse(R"({"seed": 9, "lambda": {"base_x": 12}, "bounds": {"measured": 20.0}})"));
  auto e = echo(f);
  // the echo is itself a valid config describing the same run
  const auto g = parse_config(e);
  EXPECT_EQ(echo(g).dump(), e.dump());
  EXPECT_EQ(g.suite.lambda.base_x, 12);
  EXPECT_EQ(*g.suite.bounds.measured, 20.0);
}

TEST(Config, TolScaleTouchesOnlyDiscretizationTolerances) {
  SuiteConfig s;
  const double flow = s.holonomy.flow_tol, eq = s.holonomy.equality_tol, fi = s.size.fi_tol;
  apply_tol_scale(s, 2.0);
  EXPECT_DOUBLE_EQ(s.holonomy.flow_tol, 2.0 * flow);
  EXPECT_DOUBLE_EQ(s.flat.tol_scale, 2.0);
  EXPECT_DOUBLE_EQ(s.holonomy.equality_tol, eq);
  EXPECT_DOUBLE_EQ(s.size.fi_tol, fi);
  EXPECT_DOUBLE_EQ(s.lambda.margin, 1.05);
  EXPECT_THROW(apply_tol_scale(s, 0.0), std::invalid_argument);
}

TEST(ConnectionSpec, RotationPreset) {
  const auto [spec, conn] = read_connection(json::parse(R"({"fiber": "sphere", "area": 1, "preset": "rotation", "smoothing": 0.05})"));
  ASSERT_TRUE(std::holds_alternative<Connection<SphereFiber>>(conn));
  const auto& nu = std::get<Connection<SphereFiber>>(conn);
  const Eigen::Vector3d r(0.0, 0.6, 0.8);
  const auto ref = rotation_connection(SphereFiber(1.0), 0.05);
  EXPECT_DOUBLE_EQ(nu.b()(0.4, 0.5, r), ref.b()(0.4, 0.5, r));
  EXPECT_EQ(spec.fiber, "sphere");
}

TEST(ConnectionSpec, ExplicitTorusTermsMatchHandBuiltConnection) {
  const auto [spec, conn] = read_connection(json::parse(R"({
    "fiber": "torus", "area": 2.0,
    "terms": [{"field": "b", "coef": 0.3, "fx": ["bump"], "fy": ["sine:2"],
               "hamiltonian": [{"k": [1, 0], "cos": 1.0, "sin": 0.0}]}]})"));
  const auto& nu = std::get<Connection<TorusFiber>>(conn);
  SeparableField<TorusFiber> b;
  b.add({0.3, {Profile1D::bump()}, {Profile1D::sine(2)}, TorusFiber::cos_p()});
  const Connection<TorusFiber> ref(TorusFiber(2.0), {}, b);
  const Eigen::Vector2d z(0.15, 0.8);
  EXPECT_DOUBLE_EQ(nu.b()(0.3, 0.2, z), ref.b()(0.3, 0.2, z));
  EXPECT_DOUBLE_EQ(nu.fiber().area(), 2.0);
}

TEST(ConnectionSpec, SphereTermsAreRecentered) {
  const auto [spec, conn] = read_connection(json::parse(R"({
    "fiber": "sphere", "terms": [{"hamiltonian": [{"exp": [0, 0, 2], "coef": 1.0}], "fx": ["bump"]}]})"));
  const auto& nu = std::get<Connection<SphereFiber>>(conn);
  EXPECT_NEAR(SphereFiber::mean(nu.b().terms().front().H), 0.0, 1e-15);
}

TEST(ConnectionSpec, MalformedSpecsAreRejected) {
  EXPECT_THROW(read_connection(json::parse(R"({"fiber": "sphere"})")), ConfigError);
  EXPECT_THROW(read_connection(json::parse(R"({"fiber": "torus", "preset": "rotation"})")), ConfigError);
  EXPECT_THROW(read_connection(json::parse(R"({"fiber": "klein", "terms": []})")), ConfigError);
  EXPECT_THROW(read_connection(json::parse(R"({"fiber": "sphere", "preset": "rotation", "smoothing": 0.7})")), ConfigError);
  EXPECT_THROW(read_connection(json::parse(R"({"fiber": "torus", "terms": [{"fx": ["wiggle"], "hamiltonian": []}]})")),
               ConfigError);
}

TEST(BoundTable, VerdictsOnlyWithMeasurement) {
  BoundsConfig c;
  for (const auto& b : bound_table(c)) EXPECT_TRUE(b.verdict == Verdict::none || b.verdict == Verdict::uncalibrated);
  c.measured = 8.0 * kPi;
  const auto t = bound_table(c);
  EXPECT_EQ(t.front().verdict, Verdict::satisfied);
  EXPECT_EQ(t.back().verdict, Verdict::uncalibrated);
}
