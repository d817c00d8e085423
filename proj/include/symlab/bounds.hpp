// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace symlab {

inline constexpr double kPi = std::numbers::pi;

enum class Verdict { none, satisfied, violated, uncalibrated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::uncalibrated: return "uncalibrated";
    default: return "none";
  }
}

/// A closed-form upper bound for λ₁ with the inputs it was computed from.
struct BoundReport {
  std::string formula;
  std::map<std::string, double> inputs;
  double bound = 0.0;
  std::optional<double> measured;
  Verdict verdict = Verdict::none;
  bool calibrated = true;
  bool degenerate = false;
  // extras for the CP^{n−1} family
  std::optional<double> size_reference;
  std::optional<bool> distinguishing;

  /// Compare a measured λ₁ against the bound. Uncalibrated bounds never give a verdict.
  BoundReport& compare(double lambda1) {
    measured = lambda1;
    if (!calibrated)
      verdict = Verdict::uncalibrated;
    else
      verdict = lambda1 <= bound ? Verdict::satisfied : Verdict::violated;
    return *this;
  }
};

/// 8π(genus + 1)/area.
inline BoundReport hersch_yang_yau(int genus, double area) {
  if (genus < 0) throw std::invalid_argument("hersch_yang_yau: genus must be nonnegative");
  if (!(area > 0.0)) throw std::invalid_argument("hersch_yang_yau: area must be positive");
  BoundReport r;
  r.formula = "8*pi*(genus+1)/area";
  r.inputs = {{"genus", genus}, {"area", area}};
  r.bound = 8.0 * kPi * (genus + 1) / area;
  return r;
}

/// 8π·s for a quasi-Kähler fibration with s = s(ω).
inline BoundReport li_yau_fibration(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("li_yau_fibration: s must be positive");
  BoundReport r;
  r.formula = "8*pi*s";
  r.inputs = {{"s", s}};
  r.bound = 8.0 * kPi * s;
  return r;
}

/// 8πn/(n−q) for the CP^{n−1} fibration P_{q,n}, with size reference n/(n−q).
/// The distinguishing flag records whether the bound is strictly below 4πn.
inline BoundReport pqn_bound(int q, int n) {
  if (n < 2 || q < 1 || q > n - 1) throw std::invalid_argument("pqn_bound: need 1 <= q <= n-1");
  BoundReport r;
  r.formula = "8*pi*n/(n-q)";
  r.inputs = {{"q", q}, {"n", n}};
  r.bound = 8.0 * kPi * n / (n - q);
  r.size_reference = static_cast<double>(n) / (n - q);
  r.distinguishing = r.bound < 4.0 * kPi * n;
  return r;
}

/// Cohomological data of a closed symplectic 2n-manifold.
struct CohomologyData {
  int n = 1;
  double c1 = 0.0;                 // (c₁(TM) ∪ [Ω]^{n−1}, [M])
  double vol = 1.0;                // ([Ω]^n, [M])
  std::optional<double> deg;       // (φ*a ∪ [Ω]^{n−1}, [M]) for a projective map φ
  std::optional<double> constant;  // the dimensional constant; absent means uncalibrated

  void validate() const {
    if (n < 1) throw std::invalid_argument("CohomologyData: n must be at least 1");
    if (!(vol > 0.0)) throw std::invalid_argument("CohomologyData: vol must be positive");
  }
};

/// 8πn·deg/vol.
inline BoundReport li_yau_projective(const CohomologyData& d) {
  d.validate();
  if (!d.deg) throw std::invalid_argument("li_yau_projective: the pullback pairing deg is required");
  BoundReport r;
  r.formula = "8*pi*n*deg/vol";
  r.inputs = {{"n", d.n}, {"deg", *d.deg}, {"vol", d.vol}};
  r.bound = 8.0 * kPi * d.n * *d.deg / d.vol;
  return r;
}

/// const(n)·8πn·(n + 2 − c1/vol). Without a supplied constant the bound is computed with 1 and
/// labelled uncalibrated; a nonpositive bracket is flagged as degenerate.
inline BoundReport theorem_1_2_b(const CohomologyData& d) {
  d.validate();
  BoundReport r;
  r.formula = "const(n)*8*pi*n*(n+2-c1/vol)";
  const double k = d.constant.value_or(1.0);
  r.calibrated = d.constant.has_value();
  r.inputs = {{"n", d.n}, {"c1", d.c1}, {"vol", d.vol}, {"const", k}};
  const double bracket = (d.n + 2) - d.c1 / d.vol;
  r.bound = k * 8.0 * kPi * d.n * bracket;
  r.degenerate = !(bracket > 0.0);
  if (!r.calibrated) r.verdict = Verdict::uncalibrated;
  return r;
}

}  // namespace symlab
