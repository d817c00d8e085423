// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "symlab/connection.hpp"
#include "symlab/grid.hpp"
#include "symlab/tensor_fields.hpp"

namespace symlab {

/// Total-space coordinates are (x, y, u₁, u₂) with (u₁, u₂) the fiber chart. The connection splits
/// each tangent vector into a horizontal part (components along the lifts X̃, Ỹ) and a vertical part.
/// Column j of the returned matrix holds the split components of the j-th coordinate vector:
/// ∂x = X̃ − v_a and ∂y = Ỹ − v_b, where v_a, v_b are the vertical parts of the lifts.
template <class Fiber>
Eigen::Matrix4d splitting_matrix(const Connection<Fiber>& nu, double x, double y, const typename Fiber::Point& z) {
  const Eigen::Vector2d va = Fiber::tangent_to_chart(nu.lift_x(x, y, z), z);
  const Eigen::Vector2d vb = Fiber::tangent_to_chart(nu.lift_y(x, y, z), z);
  Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
  P.block<2, 1>(2, 0) = -va;
  P.block<2, 1>(2, 1) = -vb;
  return P;
}

/// Coordinate components of the horizontal lifts X̃ = ∂x + v_a and Ỹ = ∂y + v_b.
template <class Fiber>
std::pair<Eigen::Vector4d, Eigen::Vector4d> horizontal_lifts(const Connection<Fiber>& nu, double x, double y,
                                                             const typename Fiber::Point& z) {
  Eigen::Vector4d X(1.0, 0.0, 0.0, 0.0), Y(0.0, 1.0, 0.0, 0.0);
  X.tail<2>() = Fiber::tangent_to_chart(nu.lift_x(x, y, z), z);
  Y.tail<2>() = Fiber::tangent_to_chart(nu.lift_y(x, y, z), z);
  return {X, Y};
}

inline Eigen::Matrix2d area_block() { return (Eigen::Matrix2d() << 0.0, 1.0, -1.0, 0.0).finished(); }

/// p*τ with τ = dx∧dy, as an antisymmetric 4×4 matrix.
inline Eigen::Matrix4d base_area_form() {
  Eigen::Matrix4d T = Eigen::Matrix4d::Zero();
  T.topLeftCorner<2, 2>() = area_block();
  return T;
}

/// Ω_f on the vertical chart block only (the product extension of the fiber form).
template <class Fiber>
Eigen::Matrix4d vertical_form(const Fiber& fiber, const typename Fiber::Point& z) {
  Eigen::Matrix4d O = Eigen::Matrix4d::Zero();
  O.bottomRightCorner<2, 2>() = fiber.omega_chart(z);
  return O;
}

/// δ^ν in coordinates: Ω_f on vertical vectors, −L τ on the horizontal lifts, no cross terms.
template <class Fiber>
Eigen::Matrix4d coupling_form_at(const Connection<Fiber>& nu, double L, double x, double y,
                                 const typename Fiber::Point& z) {
  Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
  W.topLeftCorner<2, 2>() = -L * area_block();
  W.bottomRightCorner<2, 2>() = nu.fiber().omega_chart(z);
  const Eigen::Matrix4d P = splitting_matrix(nu, x, y, z);
  return P.transpose() * W * P;
}

/// Pf(M) of an antisymmetric 4×4 matrix; M ∧ M evaluated on the coordinate frame equals 2 Pf(M).
inline double pfaffian4(const Eigen::Matrix4d& M) {
  return M(0, 1) * M(2, 3) - M(0, 2) * M(1, 3) + M(0, 3) * M(1, 2);
}

/// (α∧β)(v₁, v₂, v₃, v₄) for 2-forms given as antisymmetric matrices.
inline double wedge4(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b, const Eigen::Vector4d& v1,
                     const Eigen::Vector4d& v2, const Eigen::Vector4d& v3, const Eigen::Vector4d& v4) {
  auto f = [](const Eigen::Matrix4d& m, const Eigen::Vector4d& p, const Eigen::Vector4d& q) { return p.dot(m * q); };
  return f(a, v1, v2) * f(b, v3, v4) - f(a, v1, v3) * f(b, v2, v4) + f(a, v1, v4) * f(b, v2, v3) +
         f(a, v2, v3) * f(b, v1, v4) - f(a, v2, v4) * f(b, v1, v3) + f(a, v3, v4) * f(b, v1, v2);
}

/// FI(α∧β)(∂x, ∂y) at one base point: ∫ over the fiber of (α∧β)(X̃, Ỹ, ·, ·).
/// `forms(z)` returns the pair (α, β) at the fiber point z.
template <class Fiber, class FormsFn>
double fiber_integral(const Connection<Fiber>& nu, double x, double y, FormsFn&& forms, int fiber_quad = 16) {
  const auto q = nu.fiber().quadrature(fiber_quad);
  const Eigen::Vector4d e3(0.0, 0.0, 1.0, 0.0), e4(0.0, 0.0, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const auto& z = q.points[k];
    const auto [X, Y] = horizontal_lifts(nu, x, y, z);
    const auto [a, b] = forms(z);
    s += q.chart_weights[k] * wedge4(a, b, X, Y, e3, e4);
  }
  return s;
}

/// Largest |FI(δ∧δ)| over a base sample lattice; zero for a coupling form.
template <class Fiber>
double coupling_fi_defect(const Connection<Fiber>& nu, const CurvatureField<Fiber>& L, int base_samples = 9,
                          int fiber_quad = 16) {
  double worst = 0.0;
  for (int i = 0; i < base_samples; ++i)
    for (int j = 0; j < base_samples; ++j) {
      const double x = (i + 0.5) / base_samples, y = (j + 0.5) / base_samples;
      const double v = fiber_integral(nu, x, y, [&](const typename Fiber::Point& z) {
        const Eigen::Matrix4d d = coupling_form_at(nu, L(x, y, z), x, y, z);
        return std::make_pair(d, d);
      }, fiber_quad);
      worst = std::max(worst, std::abs(v));
    }
  return worst;
}

/// Where the would-be total form stops being symplectic.
struct DegeneracyCertificate {
  double x = 0.0, y = 0.0;
  Eigen::Vector2d fiber_chart = Eigen::Vector2d::Zero();
  double curvature = 0.0;
  double factor = 0.0;     // 1 − u·L at the node; nonpositive
  double pfaffian = 0.0;   // of the rescaled form δ + τ/u at the node
};

class DegenerateForm : public std::domain_error {
 public:
  DegenerateForm(const std::string& what, DegeneracyCertificate c) : std::domain_error(what), cert_(c) {}
  const DegeneracyCertificate& certificate() const { return cert_; }

 private:
  DegeneracyCertificate cert_;
};

struct TotalFormOptions {
  int base_quad = 24;         // midpoint cells per base axis
  int fiber_quad = 16;
  ExtremumOptions extrema{};
};

/// ω = δ^ν + τ/u, which restricts to Ω_f on fibers; its s-value Vol(M)/Vol(P, ω) equals u.
struct TotalForm {
  double u = 0.0;
  double max_L = 0.0;
  double volume = 0.0;             // ∫ ω²/2 by quadrature of the Pfaffian
  double s = 0.0;                  // A / volume
  double min_factor = 0.0;         // min over quadrature nodes of 1 − u·L
  double fi_top_power = 0.0;       // ∫_K FI(ω∧ω), which must equal 2·volume
};

template <class Fiber>
Eigen::Matrix4d total_form_at(const Connection<Fiber>& nu, double L, double u, double x, double y,
                              const typename Fiber::Point& z) {
  return coupling_form_at(nu, L, x, y, z) + base_area_form() / u;
}

namespace detail {

template <class Fiber>
DegeneracyCertificate certify(const Connection<Fiber>& nu, const CurvatureField<Fiber>& L, double u,
                              const Eigen::Vector4d& at) {
  DegeneracyCertificate c;
  c.x = at[0];
  c.y = at[1];
  c.fiber_chart = at.tail<2>();
  const auto z = nu.fiber().from_chart(c.fiber_chart);
  c.curvature = L(c.x, c.y, z);
  c.factor = 1.0 - u * c.curvature;
  try {
    c.pfaffian = pfaffian4(total_form_at(nu, c.curvature, u, c.x, c.y, z));
  } catch (const std::domain_error&) {
    // on a chart pole the split frame is still valid and has unit determinant
    const Eigen::Matrix2d O = nu.fiber().omega_chart(z);
    c.pfaffian = (1.0 / u - c.curvature) * O(0, 1);
  }
  return c;
}

}  // namespace detail

template <class Fiber>
TotalForm total_form(const Connection<Fiber>& nu, const CurvatureField<Fiber>& L, const Extrema& ext, double u,
                     const TotalFormOptions& opt = {}) {
  if (!(u > 0.0)) throw std::invalid_argument("total_form: u must be positive");
  if (ext.max > 0.0 && u * ext.max >= 1.0) {
    const auto c = detail::certify(nu, L, u, ext.argmax);
    std::ostringstream os;
    os << "total_form: u = " << u << " is not below 1/max L = " << 1.0 / ext.max << "; at (x, y) = (" << c.x << ", "
       << c.y << "), fiber chart (" << c.fiber_chart[0] << ", " << c.fiber_chart[1] << ") the factor 1 - uL is "
       << c.factor;
    throw DegenerateForm(os.str(), c);
  }
  TotalForm out;
  out.u = u;
  out.max_L = ext.max;
  out.min_factor = std::numeric_limits<double>::infinity();
  const auto q = nu.fiber().quadrature(opt.fiber_quad);
  const int nb = opt.base_quad;
  const double wb = 1.0 / (static_cast<double>(nb) * nb);
  const Eigen::Vector4d e3(0.0, 0.0, 1.0, 0.0), e4(0.0, 0.0, 0.0, 1.0);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      const double x = (i + 0.5) / nb, y = (j + 0.5) / nb;
      for (std::size_t k = 0; k < q.points.size(); ++k) {
        const auto& z = q.points[k];
        const double l = L(x, y, z);
        const Eigen::Matrix4d w = total_form_at(nu, l, u, x, y, z);
        const double pf = pfaffian4(w);
        if (!(pf > 0.0)) {
          const Eigen::Vector2d ch = Fiber::chart(z);
          throw DegenerateForm("total_form: degenerate node", detail::certify(nu, L, u, Eigen::Vector4d(x, y, ch[0], ch[1])));
        }
        out.min_factor = std::min(out.min_factor, 1.0 - u * l);
        out.volume += wb * q.chart_weights[k] * pf;
        const auto [X, Y] = horizontal_lifts(nu, x, y, z);
        out.fi_top_power += wb * q.chart_weights[k] * wedge4(w, w, X, Y, e3, e4);
      }
    }
  out.s = nu.fiber().area() / out.volume;
  return out;
}

template <class Fiber>
TotalForm total_form(const Connection<Fiber>& nu, double u, const TotalFormOptions& opt = {}) {
  const auto L = curvature(nu);
  return total_form(nu, L, curvature_extrema(L, nu.fiber(), opt.extrema), u, opt);
}

/// 1/max L, a certified lower bound for the size of the fibration; unbounded when max L ≤ 0.
struct SizeBound {
  double value = std::numeric_limits<double>::infinity();
  bool unbounded = true;
  double max_L = 0.0;
};

inline SizeBound size_lower_bound(const Extrema& ext) {
  SizeBound b;
  b.max_L = ext.max;
  if (ext.max > 0.0) {
    b.value = 1.0 / ext.max;
    b.unbounded = false;
  }
  return b;
}

template <class Fiber>
SizeBound size_lower_bound(const Connection<Fiber>& nu, const ExtremumOptions& opt = {}) {
  return size_lower_bound(curvature_extrema(curvature(nu), nu.fiber(), opt));
}

/// Base metric h(x, y) on the chart (x, y) ∈ [0,1]×[0,1) of the round sphere of area 1 given by
/// z = 1 − 2x, φ = 2πy. The chart is area preserving, so h has unit determinant and τ = dx∧dy.
inline Eigen::Matrix2d round_sphere_base_metric(double x, double) {
  const double z = 1.0 - 2.0 * x;
  const double s = 1.0 - z * z;
  return (Eigen::Matrix2d() << 1.0 / (std::numbers::pi * s), 0.0, 0.0, std::numbers::pi * s).finished();
}

/// The complex structure i on the base compatible with τ and a unit-determinant metric h: τ(·, i·) = h.
inline Eigen::Matrix2d base_complex_structure(const Eigen::Matrix2d& h) { return -area_block() * h; }

/// g = ω(·, j·) for ω = δ^ν + τ/u and j = i ⊕ J_f in the connection splitting.
/// In split components this is (1/u − L)·h on the horizontal block and the fiber metric vertically.
template <class Fiber>
class QuasiKahlerMetric {
 public:
  using Point = typename Fiber::Point;
  using BaseMetricFn = Eigen::Matrix2d (*)(double, double);

  QuasiKahlerMetric(Connection<Fiber> nu, double u, BaseMetricFn base = &round_sphere_base_metric)
      : nu_(std::move(nu)), L_(curvature(nu_)), u_(u), base_(base) {
    if (!(u > 0.0)) throw std::invalid_argument("QuasiKahlerMetric: u must be positive");
  }

  const Connection<Fiber>& connection() const { return nu_; }
  const CurvatureField<Fiber>& curvature_field() const { return L_; }
  double u() const { return u_; }

  /// Metric in total-space coordinates at (x, y, fiber point).
  Eigen::Matrix4d at(double x, double y, const Point& z) const {
    const double factor = 1.0 / u_ - L_(x, y, z);
    if (!(factor > 0.0)) {
      const Eigen::Vector2d ch = Fiber::chart(z);
      throw DegenerateForm("QuasiKahlerMetric: ω degenerates at a node",
                           detail::certify(nu_, L_, u_, Eigen::Vector4d(x, y, ch[0], ch[1])));
    }
    Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
    G.topLeftCorner<2, 2>() = factor * base_(x, y);
    G.bottomRightCorner<2, 2>() = nu_.fiber().metric_chart(z);
    const Eigen::Matrix4d P = splitting_matrix(nu_, x, y, z);
    return P.transpose() * G * P;
  }

  /// Second route: build ω and j in coordinates and contract them.
  Eigen::Matrix4d via_structures(double x, double y, const Point& z) const {
    const double l = L_(x, y, z);
    const Eigen::Matrix4d w = total_form_at(nu_, l, u_, x, y, z);
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    J.topLeftCorner<2, 2>() = base_complex_structure(base_(x, y));
    J.bottomRightCorner<2, 2>() = Fiber::complex_chart(z);
    const Eigen::Matrix4d P = splitting_matrix(nu_, x, y, z);
    const Eigen::Matrix4d j = P.inverse() * J * P;
    return compatible_metric_at(w, j);
  }

  /// Grid coordinates are (x, y, fiber chart).
  Eigen::MatrixXd operator()(std::span<const double> c) const {
    return at(c[0], c[1], Fiber::from_chart(Eigen::Vector2d(c[2], c[3])));
  }

 private:
  Connection<Fiber> nu_;
  CurvatureField<Fiber> L_;
  double u_;
  BaseMetricFn base_;
};

/// Grid on (x, y, p, q) for a torus fiber over the sphere chart: x cell-centred, the rest periodic.
inline UniformGrid quasi_kahler_grid(int base_x, int base_y, int fiber) {
  return UniformGrid({GridAxis{base_x, 1.0, false, true}, GridAxis{base_y, 1.0, true}, GridAxis{fiber, 1.0, true},
                      GridAxis{fiber, 1.0, true}});
}

}  // namespace symlab
