// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "symlab/bounds.hpp"

using namespace symlab;

namespace {
const double pi = std::acos(-1.0);
}

TEST(HerschYangYau, SphereOfUnitAreaIsEightPi) {
  EXPECT_EQ(hersch_yang_yau(0, 1.0).bound, 8.0 * pi);
}

TEST(HerschYangYau, ScalesInverselyWithAreaAndLinearlyWithGenusPlusOne) {
  const double b = hersch_yang_yau(2, 1.0).bound;
  EXPECT_DOUBLE_EQ(b, 24.0 * pi);
  EXPECT_DOUBLE_EQ(hersch_yang_yau(2, 3.0).bound * 3.0, b);
}

TEST(HerschYangYau, FlatTorusSatisfiesBound) {
  auto r = hersch_yang_yau(1, 1.0);
  r.compare(4.0 * pi * pi);
  EXPECT_EQ(r.verdict, Verdict::satisfied);
  r.compare(16.0 * pi + 1e-9);
  EXPECT_EQ(r.verdict, Verdict::violated);
}

TEST(HerschYangYau, RejectsBadInputs) {
  EXPECT_THROW(hersch_yang_yau(-1, 1.0), std::invalid_argument);
  EXPECT_THROW(hersch_yang_yau(0, 0.0), std::invalid_argument);
}

TEST(FibrationBound, IsEightPiS) {
  EXPECT_DOUBLE_EQ(li_yau_fibration(0.5).bound, 4.0 * pi);
  EXPECT_THROW(li_yau_fibration(0.0), std::invalid_argument);
}

TEST(PqnBound, ProjectiveLineOverSphere) {
  const auto b = pqn_bound(1, 2);
  EXPECT_EQ(b.bound, 16.0 * pi);
  EXPECT_EQ(*b.size_reference, 2.0);
  EXPECT_FALSE(*b.distinguishing);
}

TEST(PqnBound, DistinguishingFlagMatchesIntegerCriterion) {
  for (int n = 2; n <= 12; ++n)
    for (int q = 1; q < n; ++q) EXPECT_EQ(*pqn_bound(q, n).distinguishing, n >= 4 && q <= n - 3) << q << "," << n;
}

TEST(PqnBound, RejectsOutOfRange) {
  EXPECT_THROW(pqn_bound(0, 3), std::invalid_argument);
  EXPECT_THROW(pqn_bound(3, 3), std::invalid_argument);
}

TEST(ProjectiveBound, RoundSphereAndHomogeneity) {
  CohomologyData d{1, 2.0, 1.0, 1.0, std::nullopt};
  EXPECT_DOUBLE_EQ(li_yau_projective(d).bound, 8.0 * pi);
  d.deg = 3.0;
  d.vol = 2.0;
  EXPECT_DOUBLE_EQ(li_yau_projective(d).bound, 12.0 * pi);
  d.deg.reset();
  EXPECT_THROW(li_yau_projective(d), std::invalid_argument);
}

TEST(CombinedBound, UncalibratedWithoutConstant) {
  CohomologyData d{2, 0.0, 1.0, std::nullopt, std::nullopt};
  auto r = theorem_1_2_b(d);
  EXPECT_FALSE(r.calibrated);
  EXPECT_EQ(r.verdict, Verdict::uncalibrated);
  EXPECT_DOUBLE_EQ(r.bound, 8.0 * pi * 2 * 4);
  r.compare(1.0);
  EXPECT_EQ(r.verdict, Verdict::uncalibrated);
}

TEST(CombinedBound, CalibratedConstantScalesBound) {
  CohomologyData d{1, 1.0, 1.0, std::nullopt, 0.5};
  const auto r = theorem_1_2_b(d);
  EXPECT_TRUE(r.calibrated);
  EXPECT_DOUBLE_EQ(r.bound, 0.5 * 8.0 * pi * (3.0 - 1.0));
}

TEST(CombinedBound, FlagsDegenerateBracket) {
  CohomologyData d{1, 3.0, 1.0, std::nullopt, std::nullopt};
  EXPECT_TRUE(theorem_1_2_b(d).degenerate);
  EXPECT_DOUBLE_EQ(theorem_1_2_b(d).bound, 0.0);
  d.c1 = 0.0;
  EXPECT_FALSE(theorem_1_2_b(d).degenerate);
}

TEST(CohomologyData, ValidatesInputs) {
  CohomologyData d{0, 0.0, 1.0, std::nullopt, std::nullopt};
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d.n = 1;
  d.vol = -1.0;
  EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(Verdict, NamesAreStable) {
  EXPECT_STREQ(to_string(Verdict::satisfied), "satisfied");
  EXPECT_STREQ(to_string(Verdict::uncalibrated), "uncalibrated");
  EXPECT_STREQ(to_string(Verdict::none), "none");
}
