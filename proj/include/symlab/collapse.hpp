// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symlab/tensor_fields.hpp"
#include "symlab/trig_poly.hpp"

namespace symlab {

/// Coordinate layout of T⁴ × T^{2m}: (p₁,q₁,p₂,q₂, p₃,q₃, …).
namespace t4 {
inline constexpr std::size_t p1 = 0;
inline constexpr std::size_t q1 = 1;
inline constexpr std::size_t p2 = 2;
inline constexpr std::size_t q2 = 3;
}  // namespace t4

/// Rank threshold relative to the largest singular value.
inline constexpr double kRankThreshold = 1e-8;

class IsotropicDistribution {
 public:
  IsotropicDistribution(std::vector<VectorField> fields, BilinearField ambient, int bracket_budget)
      : fields_(std::move(fields)), ambient_(std::move(ambient)), bracket_budget_(bracket_budget) {
    if (fields_.empty()) throw std::invalid_argument("IsotropicDistribution: no generators");
    for (const auto& f : fields_)
      if (f.dim() != ambient_.dim()) throw DimensionError("IsotropicDistribution: dimension mismatch");
    for (std::size_t i = 0; i < fields_.size(); ++i)
      for (std::size_t j = i + 1; j < fields_.size(); ++j)
        if (!form_eval(ambient_, fields_[i], fields_[j]).is_zero())
          throw std::invalid_argument("IsotropicDistribution: generators are not isotropic");
  }

  const std::vector<VectorField>& fields() const { return fields_; }
  const BilinearField& ambient() const { return ambient_; }
  std::size_t dim() const { return ambient_.dim(); }
  int bracket_budget() const { return bracket_budget_; }

 private:
  std::vector<VectorField> fields_;
  BilinearField ambient_;
  int bracket_budget_;
};

/// Builds {X₁, X₂} on T⁴ × T^{fiber_dim}:
///   X₁ = ∂q₁ + sin q₁ ∂p₂,   X₂ = ∂q₂ + Σ_{j=1}^{2k} φ_j(q₁) Z_j,
/// with φ_{2j−1} = sin(j·), φ_{2j} = cos(j·), Z₁ = ∂p₁, Z₂ = ∂p₂ and Z₃… the fiber
/// coordinate fields taken cyclically. With no fiber those Z_j are the zero field.
inline IsotropicDistribution standard_distribution(int fiber_dim, int k) {
  if (fiber_dim < 0 || fiber_dim % 2 != 0)
    throw std::invalid_argument("standard_distribution: fiber dimension must be even and >= 0");
  const int m = fiber_dim / 2;
  if (k < std::max(1, m + 1))
    throw std::invalid_argument("standard_distribution: k too small to span the fiber (need k >= " +
                                std::to_string(std::max(1, m + 1)) + ")");
  const std::size_t dim = 4 + static_cast<std::size_t>(fiber_dim);

  VectorField x1 = VectorField::coordinate(dim, t4::q1);
  x1[t4::p2] = TrigPoly::sin_axis(dim, t4::q1);

  VectorField x2 = VectorField::coordinate(dim, t4::q2);
  for (int j = 1; j <= 2 * k; ++j) {
    const int harmonic = (j + 1) / 2;
    const TrigPoly phi = (j % 2 == 1) ? TrigPoly::sin_axis(dim, t4::q1, harmonic)
                                      : TrigPoly::cos_axis(dim, t4::q1, harmonic);
    std::optional<std::size_t> axis;
    if (j == 1) axis = t4::p1;
    else if (j == 2) axis = t4::p2;
    else if (fiber_dim > 0) axis = 4 + static_cast<std::size_t>((j - 3) % fiber_dim);
    if (axis) x2[*axis] += phi;
  }

  PolyMatrix ambient = standard_symplectic(dim).entries();
  return IsotropicDistribution({std::move(x1), std::move(x2)}, BilinearField(std::move(ambient), Symmetry::antisymmetric),
                               2 * k + 1);
}

/// The family φ_{2j−1}(s) = sin js, φ_{2j}(s) = cos js, j = 1..k, as one-variable polynomials.
class WronskianSystem {
 public:
  explicit WronskianSystem(int k) : k_(k) {
    if (k < 1) throw std::invalid_argument("WronskianSystem: k must be positive");
    for (int j = 1; j <= k; ++j) {
      family_.push_back(TrigPoly::sin_axis(1, 0, j));
      family_.push_back(TrigPoly::cos_axis(1, 0, j));
    }
  }

  int k() const { return k_; }
  const std::vector<TrigPoly>& family() const { return family_; }

  /// Π_{j=1..k} (∂² + j²) applied to f.
  static TrigPoly annihilator(const TrigPoly& f, int k) {
    TrigPoly g = f;
    for (int j = 1; j <= k; ++j) g = g.derive(0).derive(0) + static_cast<double>(j * j) * g;
    return g;
  }

  bool annihilated() const {
    for (const auto& f : family_)
      if (!annihilator(f, k_).is_zero()) return false;
    return true;
  }

 private:
  int k_;
  std::vector<TrigPoly> family_;
};

struct WronskianResult {
  Eigen::MatrixXd matrix;
  double determinant = 0.0;
};

/// Entry (i, j) = φ_j^{(first_order + i)}(s). The default derivative orders are 1..2k;
/// pass first_order = 0 for the 0..2k−1 variant.
inline WronskianResult wronskian_matrix(const WronskianSystem& sys, double s, int first_order = 1) {
  const auto n = static_cast<Eigen::Index>(sys.family().size());
  WronskianResult out{Eigen::MatrixXd(n, n), 0.0};
  const double pt[1] = {s};
  for (Eigen::Index j = 0; j < n; ++j) {
    TrigPoly d = sys.family()[static_cast<std::size_t>(j)];
    for (int r = 0; r < first_order; ++r) d = d.derive(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.matrix(i, j) = d(pt);
      d = d.derive(0);
    }
  }
  out.determinant = out.matrix.determinant();
  return out;
}

/// Generators together with their right-nested brackets [X_{i1},[X_{i2},[…,X_{id}]]],
/// grouped by bracket depth (depth 1 = the generators). Zero and repeated fields are pruned.
class BracketTower {
 public:
  explicit BracketTower(const IsotropicDistribution& D) : generators_(D.fields()), budget_(D.bracket_budget()) {
    levels_.push_back(generators_);
  }

  const std::vector<VectorField>& level(int depth) {
    if (depth < 1) throw std::invalid_argument("BracketTower: depth must be >= 1");
    if (depth > budget_)
      throw std::invalid_argument("BracketTower: depth " + std::to_string(depth) + " exceeds bracket budget " +
                                  std::to_string(budget_));
    while (static_cast<int>(levels_.size()) < depth) {
      std::vector<VectorField> next;
      for (const auto& x : generators_) {
        for (const auto& b : levels_.back()) {
          VectorField br = lie_bracket(x, b);
          if (br.is_zero()) continue;
          if (std::find(next.begin(), next.end(), br) != next.end()) continue;
          next.push_back(std::move(br));
        }
      }
      levels_.push_back(std::move(next));
    }
    return levels_[static_cast<std::size_t>(depth - 1)];
  }

  /// Rank of span{brackets of depth <= d} at the point, for d = 1..depth.
  std::vector<int> rank_flag(std::span<const double> point, int depth) {
    if (depth < 1) throw std::invalid_argument("hormander_flag: depth must be >= 1");
    level(depth);
    std::vector<int> ranks;
    std::vector<Eigen::VectorXd> cols;
    const auto dim = static_cast<Eigen::Index>(generators_.front().dim());
    for (int d = 1; d <= depth; ++d) {
      for (const auto& f : levels_[static_cast<std::size_t>(d - 1)]) cols.push_back(f(point));
      Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = cols[c];
      ranks.push_back(numerical_rank(m));
    }
    return ranks;
  }

  static int numerical_rank(const Eigen::MatrixXd& m) {
    if (m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > kRankThreshold * sv[0]) ++r;
    return r;
  }

 private:
  std::vector<VectorField> generators_;
  int budget_;
  std::vector<std::vector<VectorField>> levels_;
};

inline std::vector<int> hormander_flag(const IsotropicDistribution& D, std::span<const double> point, int depth) {
  BracketTower tower(D);
  return tower.rank_flag(point, depth);
}

/// Pointwise g-orthogonal projectors onto L, JL and V = (L ⊕ JL)^⊥.
struct Projectors {
  Eigen::MatrixXd L, JL, V;
};

/// TM = L ⊕ JL ⊕ V for a compatible pair (g, J) and an isotropic distribution L.
/// Projectors are obtained by Gram–Schmidt in g at each point; they are not
/// trigonometric polynomials in general, so this type evaluates them on demand.
class MetricSplitting {
 public:
  MetricSplitting(BilinearField g, EndomorphismField J, IsotropicDistribution D,
                  const std::vector<std::vector<double>>& check_points)
      : g_(std::move(g)), J_(std::move(J)), D_(std::move(D)) {
    if (g_.dim() != J_.dim() || g_.dim() != D_.dim()) throw DimensionError("MetricSplitting: dimension mismatch");
    for (const auto& x : check_points) at(x);
  }

  const BilinearField& metric() const { return g_; }
  const EndomorphismField& complex_structure() const { return J_; }
  const IsotropicDistribution& distribution() const { return D_; }
  std::size_t dim() const { return g_.dim(); }

  /// (dim L, dim JL, dim V)
  std::array<int, 3> rank_profile() const {
    const int r = static_cast<int>(D_.fields().size());
    return {r, r, static_cast<int>(dim()) - 2 * r};
  }

  Projectors at(std::span<const double> x) const {
    const Eigen::MatrixXd G = g_(x);
    const Eigen::MatrixXd Jx = J_(x);
    const auto n = static_cast<Eigen::Index>(dim());
    const auto r = static_cast<Eigen::Index>(D_.fields().size());
    Eigen::MatrixXd E(n, r);
    for (Eigen::Index c = 0; c < r; ++c) {
      Eigen::VectorXd v = D_.fields()[static_cast<std::size_t>(c)](x);
      const double original = std::sqrt(v.dot(G * v));
      for (Eigen::Index p = 0; p < c; ++p) v -= E.col(p) * E.col(p).dot(G * v);
      const double norm = std::sqrt(std::max(0.0, v.dot(G * v)));
      if (!(norm > 1e-10 * original))
        throw std::invalid_argument("MetricSplitting: generators are dependent at a sample point");
      E.col(c) = v / norm;
    }
    const Eigen::MatrixXd JE = Jx * E;
    Projectors P;
    P.L = E * E.transpose() * G;
    P.JL = JE * JE.transpose() * G;
    P.V = Eigen::MatrixXd::Identity(n, n) - P.L - P.JL;
    return P;
  }

 private:
  BilinearField g_;
  EndomorphismField J_;
  IsotropicDistribution D_;
};

inline MetricSplitting splitting_from_distribution(const BilinearField& g, const EndomorphismField& J,
                                                   const IsotropicDistribution& D) {
  return MetricSplitting(g, J, D, lattice_samples(g.dim(), g.dim() <= 4 ? 8 : 4));
}

/// g_t = t⁻¹g on L ⊕ t·g on JL ⊕ g on V.
class DeformedMetric {
 public:
  DeformedMetric(const MetricSplitting& split, double t) : split_(&split), t_(t) {
    if (!(t > 0.0)) throw std::invalid_argument("deformed_metric: t must be positive");
  }

  double t() const { return t_; }
  std::size_t dim() const { return split_->dim(); }
  const MetricSplitting& splitting() const { return *split_; }

  Eigen::MatrixXd operator()(std::span<const double> x) const {
    const Projectors P = split_->at(x);
    const Eigen::MatrixXd G = split_->metric()(x);
    Eigen::MatrixXd gt = (P.L.transpose() * G * P.L) / t_ + t_ * (P.JL.transpose() * G * P.JL) +
                         P.V.transpose() * G * P.V;
    return 0.5 * (gt + gt.transpose());
  }

  /// J_t = t⁻¹J on L, tJ on JL, J on V.
  Eigen::MatrixXd complex_structure(std::span<const double> x) const {
    const Projectors P = split_->at(x);
    const Eigen::MatrixXd Jx = split_->complex_structure()(x);
    return Jx * (P.L / t_ + t_ * P.JL + P.V);
  }

 private:
  const MetricSplitting* split_;
  double t_;
};

inline DeformedMetric deformed_metric(const MetricSplitting& split, double t) { return DeformedMetric(split, t); }

}  // namespace symlab
