// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symlab/trig_poly.hpp"

namespace symlab {

/// Vector field Σ_i V^i ∂/∂x_i on the m-torus with trigonometric-polynomial components.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::size_t dim) : comps_(dim, TrigPoly(dim)) {}
  explicit VectorField(std::vector<TrigPoly> comps) : comps_(std::move(comps)) {
    for (const auto& c : comps_)
      if (c.dim() != comps_.size()) throw DimensionError("VectorField: component dimension mismatch");
  }

  /// The coordinate field ∂/∂x_axis.
  static VectorField coordinate(std::size_t dim, std::size_t axis) {
    VectorField v(dim);
    v.comps_.at(axis) = TrigPoly::constant(dim, 1.0);
    return v;
  }

  std::size_t dim() const { return comps_.size(); }
  const TrigPoly& operator[](std::size_t i) const { return comps_.at(i); }
  TrigPoly& operator[](std::size_t i) { return comps_.at(i); }
  const std::vector<TrigPoly>& components() const { return comps_; }

  bool is_zero() const {
    for (const auto& c : comps_)
      if (!c.is_zero()) return false;
    return true;
  }

  int max_frequency() const {
    int top = 0;
    for (const auto& c : comps_) top = std::max(top, c.max_frequency());
    return top;
  }

  Eigen::VectorXd operator()(std::span<const double> x) const {
    Eigen::VectorXd out(dim());
    for (std::size_t i = 0; i < dim(); ++i) out[i] = comps_[i](x);
    return out;
  }

  VectorField& operator+=(const VectorField& o) {
    check_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    check_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(const TrigPoly& f, const VectorField& v) {
    VectorField out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) out.comps_[i] = f * v.comps_[i];
    return out;
  }
  friend VectorField operator*(double s, VectorField v) {
    for (auto& c : v.comps_) c *= s;
    return v;
  }
  friend bool operator==(const VectorField& a, const VectorField& b) { return a.comps_ == b.comps_; }

  /// Directional derivative V(f) = Σ_i V^i ∂_i f.
  TrigPoly apply(const TrigPoly& f) const {
    if (f.dim() != dim()) throw DimensionError("VectorField::apply: dimension mismatch");
    TrigPoly out(dim());
    for (std::size_t i = 0; i < dim(); ++i)
      if (!comps_[i].is_zero()) out += comps_[i] * f.derive(i);
    return out;
  }

 private:
  void check_dim(const VectorField& o) const {
    if (o.dim() != dim()) throw DimensionError("VectorField: dimension mismatch");
  }
  std::vector<TrigPoly> comps_;
};

/// [X,Y]^k = Σ_i (X^i ∂_i Y^k − Y^i ∂_i X^k)
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  if (X.dim() != Y.dim()) throw DimensionError("lie_bracket: dimension mismatch");
  std::vector<TrigPoly> out;
  out.reserve(X.dim());
  for (std::size_t k = 0; k < X.dim(); ++k) out.push_back(X.apply(Y[k]) - Y.apply(X[k]));
  return VectorField(std::move(out));
}

/// Square matrix of trigonometric polynomials on the m-torus.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  explicit PolyMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, TrigPoly(dim)) {}

  static PolyMatrix from_constant(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionError("PolyMatrix: matrix must be square");
    const auto dim = static_cast<std::size_t>(m.rows());
    PolyMatrix out(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        out(i, j) = TrigPoly::constant(dim, m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    return out;
  }

  std::size_t dim() const { return dim_; }
  TrigPoly& operator()(std::size_t i, std::size_t j) { return entries_.at(i * dim_ + j); }
  const TrigPoly& operator()(std::size_t i, std::size_t j) const { return entries_.at(i * dim_ + j); }

  Eigen::MatrixXd operator()(std::span<const double> x) const {
    Eigen::MatrixXd out(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) = (*this)(i, j)(x);
    return out;
  }

  int max_frequency() const {
    int top = 0;
    for (const auto& e : entries_) top = std::max(top, e.max_frequency());
    return top;
  }

  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.dim_ != b.dim_) throw DimensionError("PolyMatrix: dimension mismatch");
    PolyMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t j = 0; j < a.dim_; ++j)
        for (std::size_t k = 0; k < a.dim_; ++k)
          if (!a(i, k).is_zero() && !b(k, j).is_zero()) out(i, j) += a(i, k) * b(k, j);
    return out;
  }

  PolyMatrix transpose() const {
    PolyMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) = (*this)(j, i);
    return out;
  }

  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<TrigPoly> entries_;
};

enum class Symmetry { general, symmetric, antisymmetric };

/// B(X,Y) = Σ X^i B_ij Y^j. Metrics are flagged symmetric, symplectic forms antisymmetric.
class BilinearField {
 public:
  BilinearField() = default;
  BilinearField(PolyMatrix entries, Symmetry sym) : entries_(std::move(entries)), sym_(sym) {
    if (!pattern_matches(entries_, sym_))
      throw std::invalid_argument("BilinearField: entries do not match the symmetry flag");
  }

  std::size_t dim() const { return entries_.dim(); }
  Symmetry symmetry() const { return sym_; }
  const PolyMatrix& entries() const { return entries_; }
  const TrigPoly& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  Eigen::MatrixXd operator()(std::span<const double> x) const { return entries_(x); }

  static bool pattern_matches(const PolyMatrix& m, Symmetry sym) {
    if (sym == Symmetry::general) return true;
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) {
        const TrigPoly expected = sym == Symmetry::symmetric ? m(j, i) : -m(j, i);
        if (!(m(i, j) == expected)) return false;
      }
    return true;
  }

  /// Checks positive definiteness by Cholesky at every sample point.
  bool positive_definite_on(const std::vector<std::vector<double>>& samples) const {
    for (const auto& x : samples) {
      Eigen::LLT<Eigen::MatrixXd> llt((*this)(x));
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }

 private:
  PolyMatrix entries_;
  Symmetry sym_ = Symmetry::general;
};

/// Endomorphism field acting on tangent vectors: (J V)^i = Σ_j J_ij V^j.
class EndomorphismField {
 public:
  EndomorphismField() = default;
  explicit EndomorphismField(PolyMatrix entries) : entries_(std::move(entries)) {}

  std::size_t dim() const { return entries_.dim(); }
  const PolyMatrix& entries() const { return entries_; }
  Eigen::MatrixXd operator()(std::span<const double> x) const { return entries_(x); }

  VectorField apply(const VectorField& v) const {
    if (v.dim() != dim()) throw DimensionError("EndomorphismField::apply: dimension mismatch");
    std::vector<TrigPoly> out(dim(), TrigPoly(dim()));
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j)
        if (!entries_(i, j).is_zero() && !v[j].is_zero()) out[i] += entries_(i, j) * v[j];
    return VectorField(std::move(out));
  }

  friend EndomorphismField operator*(const EndomorphismField& a, const EndomorphismField& b) {
    return EndomorphismField(a.entries_ * b.entries_);
  }

  /// J² = −Id as a polynomial identity.
  bool is_almost_complex() const {
    const PolyMatrix sq = entries_ * entries_;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) {
        const TrigPoly expected = TrigPoly::constant(dim(), i == j ? -1.0 : 0.0);
        if (!(sq(i, j) == expected)) return false;
      }
    return true;
  }

 private:
  PolyMatrix entries_;
};

inline TrigPoly form_eval(const BilinearField& B, const VectorField& X, const VectorField& Y) {
  if (B.dim() != X.dim() || B.dim() != Y.dim()) throw DimensionError("form_eval: dimension mismatch");
  TrigPoly out(B.dim());
  for (std::size_t i = 0; i < B.dim(); ++i) {
    if (X[i].is_zero()) continue;
    for (std::size_t j = 0; j < B.dim(); ++j) {
      if (B(i, j).is_zero() || Y[j].is_zero()) continue;
      out += X[i] * B(i, j) * Y[j];
    }
  }
  return out;
}

/// Raised when (Ω, J) does not produce a Riemannian metric.
class IncompatibleStructure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform sample points on the m-torus used for pointwise definiteness checks.
inline std::vector<std::vector<double>> lattice_samples(std::size_t dim, int per_axis) {
  std::vector<std::vector<double>> pts;
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= static_cast<std::size_t>(per_axis);
  pts.reserve(total);
  const double h = 2.0 * M_PI / per_axis;
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> x(dim);
    std::size_t r = n;
    for (std::size_t i = 0; i < dim; ++i) {
      // offset by a quarter cell so samples avoid the symmetric points of low-frequency data
      x[i] = (static_cast<double>(r % per_axis) + 0.25) * h;
      r /= per_axis;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

/// g(ξ,η) = Ω(ξ, Jη), i.e. g_ij = Σ_k Ω_ik J_kj.
inline BilinearField compatible_metric(const BilinearField& omega, const EndomorphismField& J,
                                       const std::vector<std::vector<double>>& samples) {
  if (omega.dim() != J.dim()) throw DimensionError("compatible_metric: dimension mismatch");
  if (omega.symmetry() != Symmetry::antisymmetric)
    throw IncompatibleStructure("compatible_metric: Ω must be antisymmetric");
  if (!J.is_almost_complex()) throw IncompatibleStructure("compatible_metric: J² ≠ −Id");
  const PolyMatrix g = omega.entries() * J.entries();
  if (!BilinearField::pattern_matches(g, Symmetry::symmetric))
    throw IncompatibleStructure("compatible_metric: Ω(·,J·) is not symmetric");
  BilinearField metric(g, Symmetry::symmetric);
  if (!metric.positive_definite_on(samples))
    throw IncompatibleStructure("compatible_metric: Ω(·,J·) is indefinite");
  return metric;
}

inline BilinearField compatible_metric(const BilinearField& omega, const EndomorphismField& J) {
  return compatible_metric(omega, J, lattice_samples(omega.dim(), omega.dim() <= 4 ? 6 : 3));
}

/// Pointwise variant for structures that are only available as matrices at a point.
inline Eigen::MatrixXd compatible_metric_at(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& J) {
  Eigen::MatrixXd g = omega * J;
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw IncompatibleStructure("compatible_metric_at: Ω(·,J·) is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw IncompatibleStructure("compatible_metric_at: indefinite");
  return 0.5 * (g + g.transpose());
}

/// Standard symplectic form Σ dp_i ∧ dq_i on a torus with coordinates ordered (p₁,q₁,p₂,q₂,…).
inline BilinearField standard_symplectic(std::size_t dim) {
  if (dim % 2 != 0) throw DimensionError("standard_symplectic: dimension must be even");
  PolyMatrix m(dim);
  for (std::size_t b = 0; b < dim; b += 2) {
    m(b, b + 1) = TrigPoly::constant(dim, 1.0);
    m(b + 1, b) = TrigPoly::constant(dim, -1.0);
  }
  return BilinearField(std::move(m), Symmetry::antisymmetric);
}

/// J∂p = ∂q, J∂q = −∂p: the complex structure for which Ω_std(·,J·) is Euclidean.
inline EndomorphismField standard_complex(std::size_t dim) {
  if (dim % 2 != 0) throw DimensionError("standard_complex: dimension must be even");
  PolyMatrix m(dim);
  for (std::size_t b = 0; b < dim; b += 2) {
    m(b + 1, b) = TrigPoly::constant(dim, 1.0);
    m(b, b + 1) = TrigPoly::constant(dim, -1.0);
  }
  return EndomorphismField(std::move(m));
}

inline BilinearField euclidean_metric(std::size_t dim) {
  return BilinearField(PolyMatrix::from_constant(Eigen::MatrixXd::Identity(dim, dim)), Symmetry::symmetric);
}

}  // namespace symlab
