// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symlab/assembly.hpp"
#include "symlab/tensor_fields.hpp"
#include "symlab/trig_poly.hpp"

namespace symlab {

/// Polynomial in the ambient coordinates (x, y, z) of R³, used as a Hamiltonian on the unit sphere.
class SpherePoly {
 public:
  using Exponent = std::array<int, 3>;

  SpherePoly() = default;
  static SpherePoly monomial(int a, int b, int c, double coef = 1.0) {
    SpherePoly p;
    p.add(Exponent{a, b, c}, coef);
    return p;
  }
  static SpherePoly constant(double v) { return monomial(0, 0, 0, v); }

  const std::map<Exponent, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }

  void add(const Exponent& e, double c) {
    if (c == 0.0) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double operator()(const Eigen::Vector3d& r) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += c * std::pow(r.x(), e[0]) * std::pow(r.y(), e[1]) * std::pow(r.z(), e[2]);
    return s;
  }

  SpherePoly derive(int axis) const {
    SpherePoly d;
    for (const auto& [e, c] : terms_) {
      if (e[axis] == 0) continue;
      Exponent f = e;
      --f[axis];
      d.add(f, c * e[axis]);
    }
    return d;
  }

  /// Mean over the unit sphere; monomial integrals are products of Gamma functions.
  double mean() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += c * monomial_mean(e);
    return s;
  }
  SpherePoly without_mean() const {
    SpherePoly p = *this;
    p.add(Exponent{0, 0, 0}, -mean());
    return p;
  }

  static double monomial_mean(const Exponent& e) {
    if (e[0] % 2 || e[1] % 2 || e[2] % 2) return 0.0;
    const double b0 = (e[0] + 1) / 2.0, b1 = (e[1] + 1) / 2.0, b2 = (e[2] + 1) / 2.0;
    const double integral = 2.0 * std::tgamma(b0) * std::tgamma(b1) * std::tgamma(b2) / std::tgamma(b0 + b1 + b2);
    return integral / (4.0 * std::numbers::pi);
  }

  SpherePoly& operator+=(const SpherePoly& o) {
    for (const auto& [e, c] : o.terms_) add(e, c);
    return *this;
  }
  SpherePoly& operator*=(double a) {
    if (a == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= a;
    return *this;
  }
  friend SpherePoly operator+(SpherePoly a, const SpherePoly& b) { return a += b; }
  friend SpherePoly operator-(SpherePoly a, const SpherePoly& b) { return a += b * -1.0; }
  friend SpherePoly operator*(SpherePoly a, double s) { return a *= s; }
  friend SpherePoly operator*(double s, SpherePoly a) { return a *= s; }
  friend SpherePoly operator*(const SpherePoly& a, const SpherePoly& b) {
    SpherePoly p;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) p.add(Exponent{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return p;
  }
  friend std::ostream& operator<<(std::ostream& os, const SpherePoly& p) {
    if (p.terms_.empty()) return os << "0";
    bool first = true;
    for (const auto& [e, c] : p.terms_) {
      os << (first ? "" : " + ") << c << "·x^" << e[0] << "y^" << e[1] << "z^" << e[2];
      first = false;
    }
    return os;
  }

 private:
  std::map<Exponent, double> terms_;
};

/// Fiber quadrature: points with symplectic-area weights and chart (coordinate) weights.
template <class Point>
struct FiberQuadrature {
  std::vector<Point> points;
  std::vector<double> area_weights;   // sum to the fiber area
  std::vector<double> chart_weights;  // du₁du₂ in the fiber chart
};

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[n - 1 - i] = z;
    w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Flat torus fiber R²/Z² with Ω_f = A dp∧dq. Hamiltonians are trigonometric polynomials in the
/// angles (2πp, 2πq), so a frequency-1 term has period 1 in the unit-period coordinates.
class TorusFiber {
 public:
  using Point = Eigen::Vector2d;
  using Tangent = Eigen::Vector2d;
  using Hamiltonian = TrigPoly;

  explicit TorusFiber(double area = 1.0) : area_(area) {
    if (!(area > 0.0)) throw std::invalid_argument("TorusFiber: area must be positive");
  }

  static constexpr const char* kind() { return "torus"; }
  double area() const { return area_; }
  /// +1 for dH = −i_X Ω. The opposite value exists only to demonstrate that the checks detect it.
  int sgrad_sign = +1;

  static Hamiltonian zero() { return TrigPoly(2); }
  static Hamiltonian cos_p(int j = 1) { return TrigPoly::cos_axis(2, 0, j); }
  static Hamiltonian sin_p(int j = 1) { return TrigPoly::sin_axis(2, 0, j); }
  static Hamiltonian cos_q(int j = 1) { return TrigPoly::cos_axis(2, 1, j); }
  static Hamiltonian sin_q(int j = 1) { return TrigPoly::sin_axis(2, 1, j); }

  static double eval(const Hamiltonian& H, const Point& z) {
    const double ang[2] = {2.0 * std::numbers::pi * z[0], 2.0 * std::numbers::pi * z[1]};
    return H(std::span<const double>(ang, 2));
  }
  /// Partial derivatives ∂H/∂p, ∂H/∂q as Hamiltonians.
  static std::vector<Hamiltonian> gradient(const Hamiltonian& H) {
    return {H.derive(0) * (2.0 * std::numbers::pi), H.derive(1) * (2.0 * std::numbers::pi)};
  }
  Tangent sgrad_from_gradient(const double* grad, const Point&) const {
    return Tangent(-grad[1], grad[0]) * (sgrad_sign / area_);
  }
  Tangent sgrad(const Hamiltonian& H, const Point& z) const {
    const auto g = gradient(H);
    const double d[2] = {eval(g[0], z), eval(g[1], z)};
    return sgrad_from_gradient(d, z);
  }
  /// Independent route: solve −Ωᵀ X = dH in the chart with the fixed sign convention.
  Tangent sgrad_reference(const Hamiltonian& H, const Point& z) const {
    const auto g = gradient(H);
    const double d[2] = {eval(g[0], z), eval(g[1], z)};
    return sgrad_reference_from_gradient(d, z);
  }
  Tangent sgrad_reference_from_gradient(const double* grad, const Point& z) const {
    const Eigen::Vector2d dH(grad[0], grad[1]);
    return -omega_chart(z).transpose().partialPivLu().solve(dH);
  }
  /// Orthonormal tangent basis in the representation coordinates.
  static std::array<Tangent, 2> tangent_basis(const Point&) { return {Tangent(1.0, 0.0), Tangent(0.0, 1.0)}; }

  /// {H, G} = Ω(X_H, X_G), recentered to fiber mean zero.
  Hamiltonian bracket(const Hamiltonian& H, const Hamiltonian& G) const {
    const auto gh = gradient(H), gg = gradient(G);
    return ((gh[0] * gg[1] - gh[1] * gg[0]) * (1.0 / area_)).without_mean();
  }
  static Hamiltonian without_mean(const Hamiltonian& H) { return H.without_mean(); }
  static double mean(const Hamiltonian& H) { return H.mean(); }

  static Point advance(const Point& z, const Tangent& dz) { return z + dz; }
  static Tangent difference(const Point& a, const Point& b) {
    Tangent d = a - b;
    for (int i = 0; i < 2; ++i) d[i] -= std::round(d[i]);
    return d;
  }
  static double distance(const Point& a, const Point& b) { return difference(a, b).norm(); }

  static Eigen::Vector2d chart(const Point& z) { return z; }
  static Point from_chart(const Eigen::Vector2d& u) { return u; }
  static Eigen::Vector2d tangent_to_chart(const Tangent& v, const Point&) { return v; }
  Eigen::Matrix2d omega_chart(const Point&) const { return (Eigen::Matrix2d() << 0.0, area_, -area_, 0.0).finished(); }
  /// Fiber structure J∂p = ∂q, J∂q = −∂p and the compatible metric A(dp² + dq²).
  static Eigen::Matrix2d complex_chart(const Point&) { return (Eigen::Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished(); }
  Eigen::Matrix2d metric_chart(const Point& z) const { return compatible_metric_at(omega_chart(z), complex_chart(z)); }

  FiberQuadrature<Point> quadrature(int n) const {
    FiberQuadrature<Point> q;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        q.points.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
        q.area_weights.push_back(area_ / (static_cast<double>(n) * n));
        q.chart_weights.push_back(1.0 / (static_cast<double>(n) * n));
      }
    return q;
  }
  /// Sample set for extremum searches.
  static std::vector<Point> sample_points(int n) {
    std::vector<Point> pts;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) pts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    return pts;
  }
  static Eigen::Vector2d chart_scale() { return Eigen::Vector2d(1.0, 1.0); }
  template <class Rng>
  static Point random_point(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p = u(rng);
    return Point(p, u(rng));
  }
  /// Random mean-zero Hamiltonian with frequencies ≤ max_freq and coefficients in [−1, 1].
  template <class Rng>
  static Hamiltonian random_hamiltonian(Rng& rng, int max_freq) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TrigPoly H(2);
    for (int a = 0; a <= max_freq; ++a)
      for (int b = -max_freq; b <= max_freq; ++b) {
        if (a == 0 && b <= 0) continue;
        const double c = u(rng);
        H.add_term({a, b}, c, u(rng));
      }
    return H;
  }
  static int resolution_needed(const Hamiltonian& H) { return 2 * H.max_frequency() + 2; }

 private:
  double area_;
};

/// Round sphere fiber of total area A, Ω_f = (A/4π) dz∧dθ, points stored in ambient R³.
class SphereFiber {
 public:
  using Point = Eigen::Vector3d;
  using Tangent = Eigen::Vector3d;
  using Hamiltonian = SpherePoly;

  explicit SphereFiber(double area = 1.0) : area_(area) {
    if (!(area > 0.0)) throw std::invalid_argument("SphereFiber: area must be positive");
  }

  static constexpr const char* kind() { return "sphere"; }
  double area() const { return area_; }
  double c() const { return area_ / (4.0 * std::numbers::pi); }
  int sgrad_sign = +1;

  static Hamiltonian zero() { return SpherePoly(); }
  static Hamiltonian height(double scale = 1.0) { return SpherePoly::monomial(0, 0, 1, scale); }

  static double eval(const Hamiltonian& H, const Point& r) { return H(r); }
  static std::vector<Hamiltonian> gradient(const Hamiltonian& H) { return {H.derive(0), H.derive(1), H.derive(2)}; }
  Tangent sgrad_from_gradient(const double* grad, const Point& r) const {
    const Eigen::Vector3d g(grad[0], grad[1], grad[2]);
    return g.cross(r) * (sgrad_sign / c());
  }
  Tangent sgrad(const Hamiltonian& H, const Point& r) const {
    const auto g = gradient(H);
    const double d[3] = {g[0](r), g[1](r), g[2](r)};
    return sgrad_from_gradient(d, r);
  }
  /// Independent route in the (z, θ) chart: −Ωᵀ X = dH, then pushed to ambient coordinates.
  Tangent sgrad_reference(const Hamiltonian& H, const Point& r) const {
    const auto g = gradient(H);
    const double d[3] = {g[0](r), g[1](r), g[2](r)};
    return sgrad_reference_from_gradient(d, r);
  }
  Tangent sgrad_reference_from_gradient(const double* gr, const Point& r) const {
    const Eigen::Vector3d grad(gr[0], gr[1], gr[2]);
    const double rho = std::hypot(r.x(), r.y());
    if (rho < 1e-9) throw std::domain_error("sgrad_reference: chart singular at the poles");
    const double th = std::atan2(r.y(), r.x());
    // chart tangent basis ∂z, ∂θ at r
    const Eigen::Vector3d dz(-r.z() / rho * std::cos(th), -r.z() / rho * std::sin(th), 1.0);
    const Eigen::Vector3d dth(-r.y(), r.x(), 0.0);
    const Eigen::Vector2d dH(grad.dot(dz), grad.dot(dth));
    const Eigen::Vector2d X = -omega_chart(r).transpose().partialPivLu().solve(dH);
    return X[0] * dz + X[1] * dth;
  }
  static std::array<Tangent, 2> tangent_basis(const Point& r) {
    const Eigen::Vector3d helper = std::abs(r.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d e1 = helper.cross(r).normalized();
    return {e1, r.cross(e1).normalized()};
  }

  /// {H, G} = Ω(X_H, X_G) = (1/c) r·(∇H × ∇G), recentered; the r-factor is written out
  /// polynomially so the bracket stays exact.
  Hamiltonian bracket(const Hamiltonian& H, const Hamiltonian& G) const {
    const auto a = gradient(H), b = gradient(G);
    const SpherePoly X = SpherePoly::monomial(1, 0, 0), Y = SpherePoly::monomial(0, 1, 0), Z = SpherePoly::monomial(0, 0, 1);
    SpherePoly out = X * (a[1] * b[2] - a[2] * b[1]) + Y * (a[2] * b[0] - a[0] * b[2]) + Z * (a[0] * b[1] - a[1] * b[0]);
    return (out * (1.0 / c())).without_mean();
  }
  static Hamiltonian without_mean(const Hamiltonian& H) { return H.without_mean(); }
  static double mean(const Hamiltonian& H) { return H.mean(); }

  static Point advance(const Point& r, const Tangent& dr) { return (r + dr).normalized(); }
  static Tangent difference(const Point& a, const Point& b) { return a - b; }
  static double distance(const Point& a, const Point& b) { return (a - b).norm(); }

  static Eigen::Vector2d chart(const Point& r) { return Eigen::Vector2d(r.z(), std::atan2(r.y(), r.x())); }
  static Point from_chart(const Eigen::Vector2d& u) {
    const double z = std::clamp(u[0], -1.0, 1.0);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Point(rho * std::cos(u[1]), rho * std::sin(u[1]), z);
  }
  static Eigen::Vector2d tangent_to_chart(const Tangent& v, const Point& r) {
    const double rho2 = r.x() * r.x() + r.y() * r.y();
    if (rho2 < 1e-18) throw std::domain_error("tangent_to_chart: chart singular at the poles");
    return Eigen::Vector2d(v.z(), (r.x() * v.y() - r.y() * v.x()) / rho2);
  }
  Eigen::Matrix2d omega_chart(const Point&) const { return (Eigen::Matrix2d() << 0.0, c(), -c(), 0.0).finished(); }
  /// Round structure in (z, θ): J∂z = (1/(1−z²))∂θ, J∂θ = −(1−z²)∂z.
  static Eigen::Matrix2d complex_chart(const Point& r) {
    const double s = 1.0 - r.z() * r.z();
    return (Eigen::Matrix2d() << 0.0, -s, 1.0 / s, 0.0).finished();
  }
  Eigen::Matrix2d metric_chart(const Point& r) const { return compatible_metric_at(omega_chart(r), complex_chart(r)); }

  /// Gauss–Legendre in z (n nodes) times 2n uniform angles; exact for polynomials of degree ≤ 2n−1.
  FiberQuadrature<Point> quadrature(int n) const {
    const auto [zs, ws] = gauss_legendre(n);
    const int m = 2 * n;
    FiberQuadrature<Point> q;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) {
        q.points.push_back(from_chart(Eigen::Vector2d(zs[i], 2.0 * std::numbers::pi * j / m)));
        q.chart_weights.push_back(ws[i] * 2.0 * std::numbers::pi / m);
        q.area_weights.push_back(q.chart_weights.back() * c());
      }
    return q;
  }
  /// Quadrature points plus both poles, where axial Hamiltonians peak.
  std::vector<Point> sample_points(int n) const {
    auto pts = quadrature(n).points;
    pts.emplace_back(0.0, 0.0, 1.0);
    pts.emplace_back(0.0, 0.0, -1.0);
    return pts;
  }
  static Eigen::Vector2d chart_scale() { return Eigen::Vector2d(2.0, 2.0 * std::numbers::pi); }
  template <class Rng>
  static Point random_point(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Point r;
    do {
      const double a = g(rng), b = g(rng);
      r = Point(a, b, g(rng));
    } while (r.norm() < 1e-6);
    return r.normalized();
  }
  /// Random mean-zero polynomial Hamiltonian of total degree ≤ max_deg.
  template <class Rng>
  static Hamiltonian random_hamiltonian(Rng& rng, int max_deg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpherePoly H;
    for (int a = 0; a <= max_deg; ++a)
      for (int b = 0; a + b <= max_deg; ++b)
        for (int c = 0; a + b + c <= max_deg; ++c)
          if (a + b + c > 0) H.add({a, b, c}, u(rng));
    return H.without_mean();
  }

 private:
  double area_;
};

/// Laplacian of the round sphere of the given area on a Gauss–Legendre (z) × uniform (θ) cell grid.
/// Cell i spans the z-interval of length w_i around node z_i; the energy is the finite-volume form of
/// ∫ (1−z²) f_z² + f_θ²/(1−z²) dz dθ, and the polar faces carry no flux.
inline std::pair<StiffnessOperator, MassWeights> sphere_laplacian(int nz, int ntheta, double area = 4.0 * std::numbers::pi) {
  if (nz < 2 || ntheta < 4) throw std::invalid_argument("sphere_laplacian: grid too coarse");
  const auto [zs, ws] = gauss_legendre(nz);
  std::vector<double> faces(nz + 1, -1.0);
  for (int i = 0; i < nz; ++i) faces[i + 1] = faces[i] + ws[i];
  const double dth = 2.0 * std::numbers::pi / ntheta;
  const double scale = 4.0 * std::numbers::pi / area;  // metric scale R² = area/4π
  const int n = nz * ntheta;
  auto id = [&](int i, int j) { return ((j % ntheta + ntheta) % ntheta) * nz + i; };
  std::vector<Eigen::Triplet<double>> trips;
  auto couple = [&](int a, int b, double c) {
    trips.emplace_back(a, a, c);
    trips.emplace_back(b, b, c);
    trips.emplace_back(a, b, -c);
    trips.emplace_back(b, a, -c);
  };
  Eigen::VectorXd mass(n);
  for (int j = 0; j < ntheta; ++j)
    for (int i = 0; i < nz; ++i) {
      mass[id(i, j)] = ws[i] * dth / scale;
      if (i + 1 < nz) {
        const double zf = faces[i + 1];
        couple(id(i, j), id(i + 1, j), (1.0 - zf * zf) * dth / (zs[i + 1] - zs[i]));
      }
      couple(id(i, j), id(i, j + 1), ws[i] / (1.0 - zs[i] * zs[i]) / dth);
    }
  StiffnessOperator op{SparseMatrix(n, n), OperatorKind::laplace_beltrami};
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return {std::move(op), MassWeights{std::move(mass)}};
}

}  // namespace symlab
