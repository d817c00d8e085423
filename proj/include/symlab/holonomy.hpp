// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symlab/connection.hpp"

namespace symlab {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegratorOptions {
  double tol = 1e-10;      // target Richardson error estimate per trajectory
  int initial_steps = 32;
  int max_steps = 1 << 16;
  int fixed_steps = 0;     // > 0 disables step control
};

template <class Point>
struct Trajectory {
  Point end;
  double error = 0.0;  // Richardson estimate |z_N − z_2N| / 15
  int steps = 0;
};

namespace detail {

inline std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Classical RK4 for z' = v(t, z) on the fiber, using the fiber's own update rule.
template <class Fiber, class VelFn>
typename Fiber::Point rk4(const Fiber& fiber, VelFn&& v, typename Fiber::Point z, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    const auto k1 = v(t, z);
    const auto k2 = v(t + 0.5 * h, fiber.advance(z, 0.5 * h * k1));
    const auto k3 = v(t + 0.5 * h, fiber.advance(z, 0.5 * h * k2));
    const auto k4 = v(t + h, fiber.advance(z, h * k3));
    z = fiber.advance(z, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return z;
}

/// Step doubling until the Richardson estimate meets the tolerance.
template <class Fiber, class VelFn>
Trajectory<typename Fiber::Point> integrate(const Fiber& fiber, VelFn&& v, const typename Fiber::Point& z0, double t0,
                                            double t1, const IntegratorOptions& opt) {
  if (opt.fixed_steps > 0) return {rk4(fiber, v, z0, t0, t1, opt.fixed_steps), 0.0, opt.fixed_steps};
  int n = opt.initial_steps;
  auto coarse = rk4(fiber, v, z0, t0, t1, n);
  while (true) {
    auto fine = rk4(fiber, v, z0, t0, t1, 2 * n);
    const double err = fiber.distance(fine, coarse) / 15.0;
    if (err <= opt.tol) return {fine, err, 2 * n};
    if (2 * n >= opt.max_steps)
      throw IntegrationError("integrate: step budget exhausted (error " + fmt_sci(err) + ")");
    n *= 2;
    coarse = std::move(fine);
  }
}

}  // namespace detail

/// Parallel transport along the vertical segment x = s from y = t0 to y = t1.
template <class Fiber>
Trajectory<typename Fiber::Point> transport_y(const Connection<Fiber>& nu, double s, double t0, double t1,
                                              const typename Fiber::Point& z, const IntegratorOptions& opt = {}) {
  auto vel = [&](double t, const typename Fiber::Point& w) { return nu.lift_y(s, t, w); };
  return detail::integrate(nu.fiber(), vel, z, t0, t1, opt);
}

/// Parallel transport along the horizontal segment y = s from x = t0 to x = t1.
template <class Fiber>
Trajectory<typename Fiber::Point> transport_x(const Connection<Fiber>& nu, double s, double t0, double t1,
                                              const typename Fiber::Point& z, const IntegratorOptions& opt = {}) {
  auto vel = [&](double t, const typename Fiber::Point& w) { return nu.lift_x(t, s, w); };
  return detail::integrate(nu.fiber(), vel, z, t0, t1, opt);
}

/// f_s(z): transport of (s, 0, z) to the fiber over (s, 1).
template <class Fiber>
Trajectory<typename Fiber::Point> holonomy_map(const Connection<Fiber>& nu, double s, const typename Fiber::Point& z,
                                               const IntegratorOptions& opt = {}) {
  return transport_y(nu, s, 0.0, 1.0, z, opt);
}

/// Fiber maps f_s stored as point tables: images[i][k] = f_{s_i}(points[k]).
template <class Fiber>
struct HolonomyTable {
  std::vector<double> s;
  std::vector<typename Fiber::Point> points;
  std::vector<std::vector<typename Fiber::Point>> images;
  double max_error = 0.0;
};

template <class Fiber>
HolonomyTable<Fiber> holonomy_direct(const Connection<Fiber>& nu, const std::vector<double>& s_values,
                                     const std::vector<typename Fiber::Point>& points, const IntegratorOptions& opt = {}) {
  HolonomyTable<Fiber> out;
  out.s = s_values;
  out.points = points;
  out.images.resize(s_values.size());
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    out.images[i].reserve(points.size());
    for (const auto& z : points) {
      const auto tr = holonomy_map(nu, s_values[i], z, opt);
      out.images[i].push_back(tr.end);
      out.max_error = std::max(out.max_error, tr.error);
    }
  }
  return out;
}

/// F(s, z) = ∫₀¹ L(s, 1−t, Y^{−t}(s, 1, z)) dt, integrated together with the backward Y-flow.
/// F_s generates the loop: d f_s/ds = sgrad F_s ∘ f_s.
template <class Fiber>
struct GeneratorValue {
  double value = 0.0;
  double error = 0.0;
  int steps = 0;
};

namespace detail {

template <class Fiber>
std::pair<typename Fiber::Point, double> generator_rk4(const Connection<Fiber>& nu, const CurvatureField<Fiber>& L,
                                                       double s, typename Fiber::Point w, int steps) {
  const auto& fiber = nu.fiber();
  const double h = 1.0 / steps;
  double F = 0.0;
  auto vel = [&](double t, const typename Fiber::Point& p) { return (-1.0) * nu.lift_y(s, 1.0 - t, p); };
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const auto p1 = w;
    const auto k1 = vel(t, p1);
    const auto p2 = fiber.advance(w, 0.5 * h * k1);
    const auto k2 = vel(t + 0.5 * h, p2);
    const auto p3 = fiber.advance(w, 0.5 * h * k2);
    const auto k3 = vel(t + 0.5 * h, p3);
    const auto p4 = fiber.advance(w, h * k3);
    const auto k4 = vel(t + h, p4);
    F += (h / 6.0) * (L(s, 1.0 - t, p1) + 2.0 * L(s, 1.0 - t - 0.5 * h, p2) + 2.0 * L(s, 1.0 - t - 0.5 * h, p3) +
                      L(s, 1.0 - t - h, p4));
    w = fiber.advance(w, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return {w, F};
}

}  // namespace detail

template <class Fiber>
GeneratorValue<Fiber> holonomy_generator(const Connection<Fiber>& nu, const CurvatureField<Fiber>& L, double s,
                                         const typename Fiber::Point& z, const IntegratorOptions& opt = {}) {
  if (opt.fixed_steps > 0) return {detail::generator_rk4(nu, L, s, z, opt.fixed_steps).second, 0.0, opt.fixed_steps};
  int n = opt.initial_steps;
  double coarse = detail::generator_rk4(nu, L, s, z, n).second;
  while (true) {
    const double fine = detail::generator_rk4(nu, L, s, z, 2 * n).second;
    const double err = std::abs(fine - coarse) / 15.0;
    if (err <= opt.tol) return {fine, err, 2 * n};
    if (2 * n >= opt.max_steps)
      throw IntegrationError("holonomy_generator: step budget exhausted (error " + detail::fmt_sci(err) + ")");
    n *= 2;
    coarse = fine;
  }
}

/// A loop of Hamiltonians sampled on s-nodes × fiber quadrature points.
template <class Fiber>
struct SampledLoop {
  std::vector<double> s;
  std::vector<typename Fiber::Point> points;
  std::vector<double> weights;                // fiber area weights for the points
  std::vector<std::vector<double>> values;   // values[i][k] = F(s_i, points[k]) after recentering
  double max_recentering = 0.0;              // largest |fiber mean| removed
  double max_error = 0.0;                    // integrator estimate
};

template <class Fiber>
SampledLoop<Fiber> holonomy_hamiltonian(const Connection<Fiber>& nu, const CurvatureField<Fiber>& L,
                                        const std::vector<double>& s_values, int fiber_quad,
                                        const IntegratorOptions& opt = {},
                                        const std::vector<typename Fiber::Point>& extra_points = {}) {
  auto q = nu.fiber().quadrature(fiber_quad);
  // extra points (poles, known extremizers) carry zero weight: they enter the maxima, not the mean
  for (const auto& p : extra_points) {
    q.points.push_back(p);
    q.area_weights.push_back(0.0);
    q.chart_weights.push_back(0.0);
  }
  SampledLoop<Fiber> out;
  out.s = s_values;
  out.points = q.points;
  out.weights = q.area_weights;
  out.values.resize(s_values.size());
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    auto& row = out.values[i];
    double mean = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const auto g = holonomy_generator(nu, L, s_values[i], q.points[k], opt);
      row.push_back(g.value);
      mean += q.area_weights[k] * g.value;
      out.max_error = std::max(out.max_error, g.error);
    }
    mean /= nu.fiber().area();
    for (auto& v : row) v -= mean;
    out.max_recentering = std::max(out.max_recentering, std::abs(mean));
  }
  return out;
}

struct HoferLengths {
  double plus = 0.0;    // max F
  double minus = 0.0;   // −min F
  double length = 0.0;  // max |F|
};

template <class Fiber>
HoferLengths hofer_lengths(const SampledLoop<Fiber>& F) {
  HoferLengths h;
  double mx = -std::numeric_limits<double>::infinity(), mn = std::numeric_limits<double>::infinity();
  for (const auto& row : F.values)
    for (double v : row) {
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
  if (F.values.empty() || F.values.front().empty()) return h;
  h.plus = mx;
  h.minus = -mn;
  h.length = std::max(std::abs(mx), std::abs(mn));
  return h;
}

/// Analytic loop F(t, z) = Σ profile_i(t) H_i(z) with mean-zero H_i.
template <class Fiber>
struct HamiltonianLoop {
  std::vector<std::pair<Profile1D, typename Fiber::Hamiltonian>> terms;

  double operator()(double t, const typename Fiber::Point& z) const {
    double v = 0.0;
    for (const auto& [p, H] : terms) v += p(t) * Fiber::eval(H, z);
    return v;
  }
  /// Largest |F| over the first and last `window` of time; zero for an endpoint-flat loop.
  double endpoint_defect(const Fiber& fiber, double window = 0.0) const {
    double worst = 0.0;
    const auto pts = fiber.sample_points(8);
    for (double t : {0.0, window, 1.0 - window, 1.0})
      for (const auto& z : pts) worst = std::max(worst, std::abs((*this)(t, z)));
    return worst;
  }
};

/// The rotation loop of the sphere: F(t, z) = σ′_ε(t) · z/2, a full turn about the vertical axis.
inline HamiltonianLoop<SphereFiber> rotation_loop(double smoothing) {
  HamiltonianLoop<SphereFiber> F;
  F.terms.emplace_back(Profile1D::density(smoothing), SphereFiber::height(0.5));
  return F;
}

template <class Fiber>
HoferLengths hofer_lengths(const HamiltonianLoop<Fiber>& F, const Fiber& fiber, int time_samples = 257, int fiber_samples = 24) {
  Extrema e;
  const auto pts = fiber.sample_points(fiber_samples);
  for (int i = 0; i < time_samples; ++i) {
    const double t = static_cast<double>(i) / (time_samples - 1);
    for (const auto& z : pts) {
      const double v = F(t, z);
      e.max = std::max(e.max, v);
      e.min = std::min(e.min, v);
    }
  }
  HoferLengths h;
  h.plus = e.max;
  h.minus = -e.min;
  h.length = std::max(std::abs(e.max), std::abs(e.min));
  return h;
}

/// a = 0, b(x, y, z) = β(x) F(y, z). Transport along x = s then follows F for time β(s).
template <class Fiber>
Connection<Fiber> connection_from_loop(const Fiber& fiber, const HamiltonianLoop<Fiber>& F, const Profile1D& beta) {
  if (std::abs(beta(0.0)) > 1e-14 || std::abs(beta(1.0) - 1.0) > 1e-14)
    throw std::invalid_argument("connection_from_loop: ramp must satisfy beta(0) = 0, beta(1) = 1");
  if (F.endpoint_defect(fiber) > 1e-12)
    throw BoundaryError("connection_from_loop: loop is not flat at its endpoints");
  SeparableField<Fiber> b;
  for (const auto& [p, H] : F.terms) {
    SeparableTerm<Fiber> t;
    t.coef = 1.0;
    t.fx = {beta};
    t.fy = {p};
    t.H = H;
    b.add(std::move(t));
  }
  return Connection<Fiber>(fiber, SeparableField<Fiber>{}, std::move(b));
}

struct BoundaryReport {
  double tangential = 0.0;   // max |tangential component| on y = 0, y = 1 (a) and x = 0 (b)
  double closing = 0.0;      // max displacement of transport along x = 1
  bool trivial(double tol = 1e-8) const { return tangential <= tol && closing <= tol; }
};

/// Checks that ν is trivial over ∂K: the tangential parts vanish on three edges and the transport
/// along the fourth edge x = 1 closes up to the identity.
template <class Fiber>
BoundaryReport boundary_triviality(const Connection<Fiber>& nu, int samples = 33, const IntegratorOptions& opt = {}) {
  BoundaryReport r;
  const auto pts = nu.fiber().sample_points(8);
  for (int i = 0; i < samples; ++i) {
    const double u = static_cast<double>(i) / (samples - 1);
    for (const auto& z : pts) {
      r.tangential = std::max(r.tangential, std::abs(nu.a()(u, 0.0, z)));
      r.tangential = std::max(r.tangential, std::abs(nu.a()(u, 1.0, z)));
      r.tangential = std::max(r.tangential, std::abs(nu.b()(0.0, u, z)));
    }
  }
  for (const auto& z : pts) {
    const auto tr = holonomy_map(nu, 1.0, z, opt);
    r.closing = std::max(r.closing, nu.fiber().distance(tr.end, z));
  }
  return r;
}

/// Tangential gradient of a scalar function on the fiber by fourth-order central differences
/// along an orthonormal tangent basis.
template <class Fiber, class Fn>
std::array<double, 3> fiber_gradient(const Fiber& fiber, Fn&& f, const typename Fiber::Point& w, double h) {
  const auto basis = Fiber::tangent_basis(w);
  typename Fiber::Tangent g = basis[0] * 0.0;
  for (const auto& e : basis) {
    const double d = (8.0 * (f(fiber.advance(w, h * e)) - f(fiber.advance(w, -h * e))) -
                      (f(fiber.advance(w, 2.0 * h * e)) - f(fiber.advance(w, -2.0 * h * e)))) /
                     (12.0 * h);
    g += d * e;
  }
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (Eigen::Index i = 0; i < g.size(); ++i) out[static_cast<std::size_t>(i)] = g[i];
  return out;
}

struct FlowComparison {
  double sup_error = 0.0;     // sup |∂_s f_s − sgrad F_s ∘ f_s|
  double sup_velocity = 0.0;  // sup |∂_s f_s|, for scale
  double integrator_error = 0.0;
};

/// Compares the generator formula against central differences of the holonomy in s.
/// With `reference_sign` the symplectic gradient of F is taken from the fixed-convention
/// reference solver instead of the fiber's configurable one.
template <class Fiber>
FlowComparison formula_vs_flow(const Connection<Fiber>& nu, const CurvatureField<Fiber>& L,
                               const std::vector<double>& s_values, const std::vector<typename Fiber::Point>& points,
                               double base_step, bool reference_sign = false, const IntegratorOptions& opt = {},
                               double fiber_step = 1e-4) {
  const auto& fiber = nu.fiber();
  FlowComparison out;
  for (double s : s_values) {
    if (s - base_step < 0.0 || s + base_step > 1.0) throw std::invalid_argument("formula_vs_flow: s too close to the edge");
    for (const auto& z : points) {
      const auto fp = holonomy_map(nu, s + base_step, z, opt);
      const auto fm = holonomy_map(nu, s - base_step, z, opt);
      const auto f0 = holonomy_map(nu, s, z, opt);
      const typename Fiber::Tangent ds = fiber.difference(fp.end, fm.end) / (2.0 * base_step);
      auto F = [&](const typename Fiber::Point& w) { return holonomy_generator(nu, L, s, w, opt).value; };
      const auto grad = fiber_gradient(fiber, F, f0.end, fiber_step);
      const typename Fiber::Tangent X = reference_sign ? fiber.sgrad_reference_from_gradient(grad.data(), f0.end)
                                    : fiber.sgrad_from_gradient(grad.data(), f0.end);
      out.sup_error = std::max(out.sup_error, (ds - X).norm());
      out.sup_velocity = std::max(out.sup_velocity, ds.norm());
      out.integrator_error = std::max({out.integrator_error, fp.error, fm.error, f0.error});
    }
  }
  return out;
}

/// Displacement of a counter-clockwise plaquette of side h based at (x, y):
/// transport +x, +y, −x, −y. To leading order it equals h² sgrad L(x, y) at z.
template <class Fiber>
typename Fiber::Tangent plaquette_defect(const Connection<Fiber>& nu, double x, double y, double h,
                                         const typename Fiber::Point& z, const IntegratorOptions& opt = {}) {
  auto p = transport_x(nu, y, x, x + h, z, opt).end;
  p = transport_y(nu, x + h, y, y + h, p, opt).end;
  p = transport_x(nu, y + h, x + h, x, p, opt).end;
  p = transport_y(nu, x, y + h, y, p, opt).end;
  return nu.fiber().difference(p, z);
}

}  // namespace symlab
