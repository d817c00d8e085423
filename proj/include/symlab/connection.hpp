// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "symlab/fiber.hpp"

namespace symlab {

/// One-variable profile on [0, 1] together with which derivative of it is meant.
/// Closed under differentiation and under the reflection x ↦ 1 − x.
class Profile1D {
 public:
  enum class Kind { constant, linear, ramp, bump, sine };

  static Profile1D constant() { return Profile1D(Kind::constant, 0.0, 0); }
  static Profile1D linear() { return Profile1D(Kind::linear, 0.0, 0); }
  /// Smoothed ramp: 0 at 0, 1 at 1, derivative 1/(1−ε) on [ε, 1−ε] with smootherstep shoulders.
  static Profile1D ramp(double width) {
    if (!(width > 0.0 && width < 0.5)) throw std::invalid_argument("Profile1D::ramp: width must lie in (0, 0.5)");
    return Profile1D(Kind::ramp, width, 0);
  }
  /// Derivative of ramp(width): a flat-topped density of unit mass that vanishes at both ends.
  static Profile1D density(double width) { return ramp(width).derivative(); }
  /// sin²(πx).
  static Profile1D bump() { return Profile1D(Kind::bump, 0.0, 0); }
  /// sin(mπx), vanishing at both ends.
  static Profile1D sine(int m) { return Profile1D(Kind::sine, static_cast<double>(m), 0); }

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  int order() const { return order_; }
  bool reflected() const { return reflected_; }

  Profile1D derivative() const {
    Profile1D p = *this;
    ++p.order_;
    return p;
  }
  Profile1D reflect() const {
    Profile1D p = *this;
    p.reflected_ = !p.reflected_;
    return p;
  }
  bool is_zero() const {
    return (kind_ == Kind::constant && order_ > 0) || (kind_ == Kind::linear && order_ > 1);
  }

  double operator()(double x) const {
    if (!reflected_) return base(x, order_);
    return (order_ % 2 ? -1.0 : 1.0) * base(1.0 - x, order_);
  }

  std::string describe() const {
    std::string s;
    switch (kind_) {
      case Kind::constant: s = "1"; break;
      case Kind::linear: s = "x"; break;
      case Kind::ramp: s = "ramp(" + std::to_string(param_) + ")"; break;
      case Kind::bump: s = "sin^2(pi x)"; break;
      case Kind::sine: s = "sin(" + std::to_string(static_cast<int>(param_)) + " pi x)"; break;
    }
    if (reflected_) s += "[x->1-x]";
    for (int i = 0; i < order_; ++i) s += "'";
    return s;
  }

  friend bool operator==(const Profile1D& a, const Profile1D& b) {
    return a.kind_ == b.kind_ && a.param_ == b.param_ && a.order_ == b.order_ && a.reflected_ == b.reflected_;
  }

 private:
  Profile1D(Kind k, double p, int o) : kind_(k), param_(p), order_(o) {}

  double base(double x, int k) const {
    constexpr double pi = std::numbers::pi;
    switch (kind_) {
      case Kind::constant: return k == 0 ? 1.0 : 0.0;
      case Kind::linear: return k == 0 ? x : (k == 1 ? 1.0 : 0.0);
      case Kind::bump:
        if (k == 0) return 0.5 * (1.0 - std::cos(2.0 * pi * x));
        return -0.5 * std::pow(2.0 * pi, k) * std::cos(2.0 * pi * x + k * pi / 2.0);
      case Kind::sine: {
        const double w = param_ * pi;
        return std::pow(w, k) * std::sin(w * x + k * pi / 2.0);
      }
      case Kind::ramp: return ramp_value(x, k);
    }
    return 0.0;
  }

  // β on the left shoulder [0, ε]: (ε/(1−ε)) S(x/ε) with S(u) = u⁶ − 3u⁵ + 5u⁴/2, whose derivative
  // is the C² smootherstep 6u⁵ − 15u⁴ + 10u³. C² shoulders keep RK4 at full order across them.
  double ramp_value(double x, int k) const {
    const double e = param_;
    const double a = 1.0 / (1.0 - e);
    if (k > 4) throw std::domain_error("Profile1D: ramp derivatives above fourth order are not continuous");
    x = std::clamp(x, 0.0, 1.0);
    auto shoulder = [&](double u, int kk) {
      const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
      switch (kk) {
        case 0: return a * e * (u4 * u2 - 3.0 * u4 * u + 2.5 * u4);
        case 1: return a * (6.0 * u4 * u - 15.0 * u4 + 10.0 * u3);
        case 2: return a * (30.0 * u4 - 60.0 * u3 + 30.0 * u2) / e;
        case 3: return a * (120.0 * u3 - 180.0 * u2 + 60.0 * u) / (e * e);
        default: return a * (360.0 * u2 - 360.0 * u + 60.0) / (e * e * e);
      }
    };
    if (x <= e) return shoulder(x / e, k);
    if (x >= 1.0 - e) {
      // mirror image: β(x) = 1 − β(1 − x)
      const double v = shoulder((1.0 - x) / e, k);
      if (k == 0) return 1.0 - v;
      return (k % 2 ? 1.0 : -1.0) * v;
    }
    switch (k) {
      case 0: return a * e * 0.5 + a * (x - e);
      case 1: return a;
      default: return 0.0;
    }
  }

  Kind kind_;
  double param_;
  int order_;
  bool reflected_ = false;
};

/// coef · Π fx(x) · Π fy(y) · H(z).
template <class Fiber>
struct SeparableTerm {
  using Hamiltonian = typename Fiber::Hamiltonian;
  double coef = 1.0;
  std::vector<Profile1D> fx, fy;
  Hamiltonian H;

  double base(double x, double y) const {
    double v = coef;
    for (const auto& p : fx) v *= p(x);
    for (const auto& p : fy) v *= p(y);
    return v;
  }
  bool vanishes() const {
    if (coef == 0.0 || H.is_zero()) return true;
    for (const auto& p : fx)
      if (p.is_zero()) return true;
    for (const auto& p : fy)
      if (p.is_zero()) return true;
    return false;
  }
};

/// Sum of separable terms with cached fiber gradients for fast evaluation of sgrad.
template <class Fiber>
class SeparableField {
 public:
  using Hamiltonian = typename Fiber::Hamiltonian;
  using Point = typename Fiber::Point;
  using Tangent = typename Fiber::Tangent;
  using Term = SeparableTerm<Fiber>;

  SeparableField() = default;

  void add(Term t) {
    if (t.vanishes()) return;
    grads_.push_back(Fiber::gradient(t.H));
    terms_.push_back(std::move(t));
  }
  void add(const SeparableField& o) {
    for (const auto& t : o.terms_) add(t);
  }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double operator()(double x, double y, const Point& z) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      const double b = t.base(x, y);
      if (b != 0.0) s += b * Fiber::eval(t.H, z);
    }
    return s;
  }
  /// The fiber Hamiltonian at base point (x, y).
  Hamiltonian at(double x, double y) const {
    Hamiltonian h = Fiber::zero();
    for (const auto& t : terms_) {
      const double b = t.base(x, y);
      if (b != 0.0) h += t.H * b;
    }
    return h;
  }
  /// sgrad of the fiber Hamiltonian at (x, y), evaluated at z.
  Tangent sgrad(const Fiber& fiber, double x, double y, const Point& z) const {
    double g[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const double b = terms_[i].base(x, y);
      if (b == 0.0) continue;
      for (std::size_t d = 0; d < grads_[i].size(); ++d) g[d] += b * Fiber::eval(grads_[i][d], z);
    }
    return fiber.sgrad_from_gradient(g, z);
  }

  SeparableField derive_x() const { return derive(true); }
  SeparableField derive_y() const { return derive(false); }
  SeparableField scaled(double s) const {
    SeparableField out;
    for (auto t : terms_) {
      t.coef *= s;
      out.add(std::move(t));
    }
    return out;
  }
  SeparableField reflected_x(double sign) const {
    SeparableField out;
    for (auto t : terms_) {
      for (auto& p : t.fx) p = p.reflect();
      t.coef *= sign;
      out.add(std::move(t));
    }
    return out;
  }

 private:
  SeparableField derive(bool in_x) const {
    SeparableField out;
    for (const auto& t : terms_) {
      const auto& fs = in_x ? t.fx : t.fy;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        Term d = t;
        auto& target = in_x ? d.fx : d.fy;
        target[i] = target[i].derivative();
        out.add(std::move(d));
      }
    }
    return out;
  }

  std::vector<Term> terms_;
  std::vector<std::vector<Hamiltonian>> grads_;
};

class BoundaryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hamiltonian connection ν = a dx + b dy on K × M. Horizontal lifts are
/// X = ∂x + sgrad a and Y = ∂y + sgrad b.
template <class Fiber>
class Connection {
 public:
  using Hamiltonian = typename Fiber::Hamiltonian;
  using Point = typename Fiber::Point;
  using Tangent = typename Fiber::Tangent;
  using Field = SeparableField<Fiber>;

  Connection(Fiber fiber, Field a, Field b) : fiber_(std::move(fiber)), a_(std::move(a)), b_(std::move(b)) {
    for (const auto* f : {&a_, &b_})
      for (const auto& t : f->terms())
        if (std::abs(Fiber::mean(t.H)) > 1e-12 * (1.0 + std::abs(t.coef)))
          throw std::invalid_argument("Connection: Hamiltonians must have fiber mean zero");
  }
  static Connection zero(Fiber fiber) { return Connection(std::move(fiber), Field{}, Field{}); }

  const Fiber& fiber() const { return fiber_; }
  Fiber& fiber() { return fiber_; }
  const Field& a() const { return a_; }
  const Field& b() const { return b_; }

  Tangent lift_x(double x, double y, const Point& z) const { return a_.sgrad(fiber_, x, y, z); }
  Tangent lift_y(double x, double y, const Point& z) const { return b_.sgrad(fiber_, x, y, z); }

 private:
  Fiber fiber_;
  Field a_, b_;
};

/// L = ∂x b − ∂y a + {a, b}, kept symbolically as a separable sum.
template <class Fiber>
class CurvatureField {
 public:
  using Point = typename Fiber::Point;
  using Field = SeparableField<Fiber>;

  explicit CurvatureField(Field L) : L_(std::move(L)) {}
  const Field& field() const { return L_; }
  double operator()(double x, double y, const Point& z) const { return L_(x, y, z); }
  bool is_zero() const { return L_.is_zero(); }

 private:
  Field L_;
};

template <class Fiber>
CurvatureField<Fiber> curvature(const Connection<Fiber>& nu) {
  using Term = SeparableTerm<Fiber>;
  SeparableField<Fiber> L = nu.b().derive_x();
  L.add(nu.a().derive_y().scaled(-1.0));
  for (const auto& ta : nu.a().terms())
    for (const auto& tb : nu.b().terms()) {
      Term t;
      t.coef = ta.coef * tb.coef;
      t.fx = ta.fx;
      t.fx.insert(t.fx.end(), tb.fx.begin(), tb.fx.end());
      t.fy = ta.fy;
      t.fy.insert(t.fy.end(), tb.fy.begin(), tb.fy.end());
      t.H = nu.fiber().bracket(ta.H, tb.H);
      L.add(std::move(t));
    }
  return CurvatureField<Fiber>(std::move(L));
}

/// Pullback under x ↦ 1 − x: a' = −a(1−x, y), b' = b(1−x, y); curvature becomes −L(1−x, y).
template <class Fiber>
Connection<Fiber> orientation_flip(const Connection<Fiber>& nu) {
  return Connection<Fiber>(nu.fiber(), nu.a().reflected_x(-1.0), nu.b().reflected_x(1.0));
}

struct Extrema {
  double max = -std::numeric_limits<double>::infinity();
  double min = std::numeric_limits<double>::infinity();
  double grid_max = 0.0, grid_min = 0.0;  // before local polishing
  // where the extremes were found: (x, y, fiber chart u₁, u₂)
  Eigen::Vector4d argmax = Eigen::Vector4d::Zero(), argmin = Eigen::Vector4d::Zero();
  double max_abs() const { return std::max(std::abs(max), std::abs(min)); }
};

struct ExtremumOptions {
  int base_samples = 65;   // nodes per base axis, including both ends
  int fiber_samples = 24;  // fiber sample resolution
  int polish_starts = 6;   // best nodes refined by pattern search
  bool polish = true;
};

namespace detail {

/// Compass search on (x, y, u₁, u₂) with x, y clamped to [0, 1].
template <class Fiber, class Fn>
double pattern_search(const Fiber& fiber, Fn&& f, Eigen::Vector4d& v, double step0) {
  auto value = [&](const Eigen::Vector4d& w) {
    const double x = std::clamp(w[0], 0.0, 1.0), y = std::clamp(w[1], 0.0, 1.0);
    return f(x, y, fiber.from_chart(Eigen::Vector2d(w[2], w[3])));
  };
  const Eigen::Vector2d cs = Fiber::chart_scale();
  const Eigen::Vector4d scale(1.0, 1.0, cs[0], cs[1]);
  double best = value(v);
  double step = step0;
  while (step > 1e-10) {
    bool improved = false;
    for (int i = 0; i < 4; ++i)
      for (double sgn : {1.0, -1.0}) {
        Eigen::Vector4d w = v;
        w[i] += sgn * step * scale[i];
        const double val = value(w);
        if (val > best) {
          best = val;
          v = w;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  v[0] = std::clamp(v[0], 0.0, 1.0);
  v[1] = std::clamp(v[1], 0.0, 1.0);
  return best;
}

}  // namespace detail

/// Max and min of f(x, y, z) over K × fiber by sampling, then local polishing of the best nodes.
template <class Fiber, class Fn>
Extrema field_extrema(const Fiber& fiber, Fn&& f, const ExtremumOptions& opt = {}) {
  const auto pts = fiber.sample_points(opt.fiber_samples);
  struct Cand {
    double v;
    double x, y;
    std::size_t k;
  };
  std::vector<Cand> hi, lo;
  Extrema e;
  const int n = opt.base_samples;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(i) / (n - 1), y = static_cast<double>(j) / (n - 1);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const double v = f(x, y, pts[k]);
        hi.push_back({v, x, y, k});
        const Eigen::Vector2d u = Fiber::chart(pts[k]);
        if (v > e.max) {
          e.max = v;
          e.argmax = Eigen::Vector4d(x, y, u[0], u[1]);
        }
        if (v < e.min) {
          e.min = v;
          e.argmin = Eigen::Vector4d(x, y, u[0], u[1]);
        }
      }
    }
  e.grid_max = e.max;
  e.grid_min = e.min;
  if (!opt.polish) return e;
  lo = hi;
  const auto starts = std::min<std::size_t>(static_cast<std::size_t>(opt.polish_starts), hi.size());
  std::partial_sort(hi.begin(), hi.begin() + starts, hi.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
  std::partial_sort(lo.begin(), lo.begin() + starts, lo.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
  const double step = 0.5 / (n - 1);
  auto neg = [&](double x, double y, const typename Fiber::Point& z) { return -f(x, y, z); };
  for (std::size_t s = 0; s < starts; ++s) {
    const Eigen::Vector2d u = Fiber::chart(pts[hi[s].k]);
    Eigen::Vector4d at(hi[s].x, hi[s].y, u[0], u[1]);
    const double top = detail::pattern_search(fiber, f, at, step);
    if (top > e.max) {
      e.max = top;
      e.argmax = at;
    }
    const Eigen::Vector2d w = Fiber::chart(pts[lo[s].k]);
    Eigen::Vector4d bt(lo[s].x, lo[s].y, w[0], w[1]);
    const double bottom = -detail::pattern_search(fiber, neg, bt, step);
    if (bottom < e.min) {
      e.min = bottom;
      e.argmin = bt;
    }
  }
  return e;
}

template <class Fiber>
Extrema curvature_extrema(const CurvatureField<Fiber>& L, const Fiber& fiber, const ExtremumOptions& opt = {}) {
  return field_extrema(fiber, [&](double x, double y, const typename Fiber::Point& z) { return L(x, y, z); }, opt);
}

/// Largest fiber mean of L over base samples (should be rounding level).
template <class Fiber>
double curvature_mean_defect(const CurvatureField<Fiber>& L, const Fiber& fiber, int base_samples = 17, int fiber_quad = 16) {
  const auto q = fiber.quadrature(fiber_quad);
  double worst = 0.0;
  for (int i = 0; i < base_samples; ++i)
    for (int j = 0; j < base_samples; ++j) {
      const double x = static_cast<double>(i) / (base_samples - 1), y = static_cast<double>(j) / (base_samples - 1);
      double m = 0.0;
      for (std::size_t k = 0; k < q.points.size(); ++k) m += q.area_weights[k] * L(x, y, q.points[k]);
      worst = std::max(worst, std::abs(m) / fiber.area());
    }
  return worst;
}

}  // namespace symlab
