// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symlab/assembly.hpp"
#include "symlab/collapse.hpp"
#include "symlab/eigensolver.hpp"
#include "symlab/grid.hpp"

namespace symlab {

/// Lowest eigenvalues |k|² of the flat torus [0,2π)^dim, with multiplicity, count of them.
inline std::vector<double> flat_torus_spectrum(std::size_t dim, std::size_t count) {
  std::vector<double> out;
  const int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)))) + 1;
  std::vector<int> k(dim, -r);
  while (true) {
    double s = 0.0;
    for (int v : k) s += static_cast<double>(v) * v;
    out.push_back(s);
    std::size_t i = 0;
    while (i < dim && ++k[i] > r) k[i++] = -r;
    if (i == dim) break;
  }
  std::sort(out.begin(), out.end());
  out.resize(std::min(out.size(), count));
  return out;
}

/// Picks the FFT preconditioner on fully periodic grids and incomplete Cholesky otherwise.
template <class CoeffFn>
Preconditioner make_preconditioner(const UniformGrid& grid, const StiffnessOperator& A, const MassWeights& M,
                                   CoeffFn&& coeff) {
  if (grid.all_periodic()) {
    const Eigen::MatrixXd mean = mean_coefficient(grid, coeff);
    const double density = M.total() / (grid.node_count() * grid.cell_volume());
    // a small isotropic floor keeps the symbol invertible for degenerate (sub-Riemannian) coefficients
    const double floor = 0.05 * mean.trace() / static_cast<double>(grid.dim());
    const Eigen::MatrixXd reg = mean + floor * Eigen::MatrixXd::Identity(mean.rows(), mean.cols());
    return FftPreconditioner(grid, reg, density, std::max(floor, 1e-3));
  }
  return IncompleteCholeskyPreconditioner(A, M);
}

/// λ₀ … λ_{count−1} of the Laplace–Beltrami operator of a pointwise metric on a grid.
template <class MetricFn>
SpectrumResult laplace_beltrami_spectrum(const MetricFn& metric, const UniformGrid& grid, int count,
                                         EigensolverOptions opt = {}, int max_frequency = 0) {
  auto [A, M] = assemble_laplace_beltrami(metric, grid, max_frequency);
  if (!opt.preconditioner) {
    opt.preconditioner = make_preconditioner(grid, A, M, [&](std::span<const double> x) -> Eigen::MatrixXd {
      const Eigen::MatrixXd g = metric(x);
      return std::sqrt(g.determinant()) * g.inverse();
    });
  }
  return lowest_eigenpairs(A, M, count, opt);
}

/// Spectral gap of the sub-Laplacian Σ X_j* X_j with the flat volume.
inline SpectrumResult sub_laplacian_spectrum(const std::vector<VectorField>& fields, const UniformGrid& grid, int count,
                                             EigensolverOptions opt = {}) {
  const StiffnessOperator A = assemble_sub_laplacian(fields, grid);
  const MassWeights M = flat_mass(grid);
  if (!opt.preconditioner) {
    opt.preconditioner = make_preconditioner(grid, A, M, [&](std::span<const double> x) -> Eigen::MatrixXd {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.dim()), static_cast<Eigen::Index>(grid.dim()));
      for (const auto& f : fields) {
        const Eigen::VectorXd v = f(x);
        a += v * v.transpose();
      }
      return a;
    });
  }
  return lowest_eigenpairs(A, M, count, opt);
}

/// Rayleigh quotient fᵀAf / fᵀMf of a vector after removing its mass-weighted mean.
inline double rayleigh_quotient(const StiffnessOperator& A, const MassWeights& M, Eigen::VectorXd f) {
  f.array() -= f.dot(M.weights) / M.total();
  const double den = f.dot(M.weights.cwiseProduct(f));
  if (!(den > 0.0)) throw std::invalid_argument("rayleigh_quotient: vector is constant");
  return f.dot(A.matrix * f) / den;
}

struct CollapseRow {
  double t = 1.0;
  double lambda1 = 0.0;
  double lower_bound = 0.0;  // C·t / (N_f·K)
  double residual = 0.0;
  int iterations = 0;
  double anisotropy = 0.0;   // t × max frequency × h
  std::string grid;
};

struct CollapseSweep {
  std::vector<CollapseRow> rows;
  double gap_C = 0.0;          // λ₁ of the discrete sub-Laplacian
  double gap_residual = 0.0;
  double K = 0.0;              // max_j max_node g(X_j, X_j)
  std::size_t field_count = 0; // N_f
};

struct CollapseOptions {
  /// Refuse t once t × (max field frequency) × max_i h_i exceeds this.
  double anisotropy_limit = 4.0;
  EigensolverOptions solver;
};

/// t × (top frequency) × largest spacing; the resolving-power measure used by the guard.
inline double anisotropy_ratio(const MetricSplitting& split, const UniformGrid& grid, double t) {
  int top = 1;
  for (const auto& f : split.distribution().fields()) top = std::max(top, f.max_frequency());
  double h = 0.0;
  for (const auto& a : grid.axes()) h = std::max(h, a.spacing());
  return t * top * h;
}

/// max over generators and grid nodes of g(X_j, X_j).
inline double field_norm_bound(const MetricSplitting& split, const UniformGrid& grid) {
  double K = 0.0;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.coordinates(node);
    const Eigen::MatrixXd g = split.metric()(x);
    for (const auto& f : split.distribution().fields()) {
      const Eigen::VectorXd v = f(x);
      K = std::max(K, v.dot(g * v));
    }
  }
  return K;
}

inline CollapseSweep collapse_sweep(const MetricSplitting& split, const UniformGrid& grid, const std::vector<double>& ts,
                                    const CollapseOptions& opt = {}) {
  if (ts.empty()) throw std::invalid_argument("collapse_sweep: empty t list");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] >= 1.0)) throw std::invalid_argument("collapse_sweep: t values must be >= 1");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw std::invalid_argument("collapse_sweep: t values must increase");
    const double ratio = anisotropy_ratio(split, grid, ts[i]);
    if (ratio > opt.anisotropy_limit)
      throw ResolutionError("collapse_sweep: t = " + std::to_string(ts[i]) + " exceeds the resolving power of grid " +
                            grid.describe() + " (ratio " + std::to_string(ratio) + " > " +
                            std::to_string(opt.anisotropy_limit) + ")");
  }

  CollapseSweep out;
  out.field_count = split.distribution().fields().size();
  out.K = field_norm_bound(split, grid);
  const SpectrumResult gap = sub_laplacian_spectrum(split.distribution().fields(), grid, 2, opt.solver);
  out.gap_C = gap.lambda1();
  out.gap_residual = gap.residuals[1];

  for (double t : ts) {
    const DeformedMetric gt(split, t);
    const SpectrumResult r = laplace_beltrami_spectrum(gt, grid, 2, opt.solver);
    CollapseRow row;
    row.t = t;
    row.lambda1 = r.lambda1();
    row.lower_bound = out.gap_C * t / (static_cast<double>(out.field_count) * out.K);
    row.residual = r.residuals[1];
    row.iterations = r.iterations;
    row.anisotropy = anisotropy_ratio(split, grid, t);
    row.grid = grid.describe();
    out.rows.push_back(row);
  }
  return out;
}

/// Continuum Rayleigh quotient of f = cos x_a for a metric that depends on the coordinate x_d only
/// (a ≠ d). Averaging over x_a leaves ∫ g^{aa} √det g dx_d / ∫ √det g dx_d, evaluated with the
/// periodic midpoint rule, which converges spectrally for smooth integrands. Any such value bounds
/// λ₁ from above because cos x_a is orthogonal to constants for the invariant volume.
template <class MetricFn>
double cosine_mode_rayleigh_quotient(const MetricFn& metric, std::size_t dim, std::size_t a, std::size_t d,
                                     int samples = 512) {
  if (a == d || a >= dim || d >= dim) throw std::invalid_argument("cosine_mode_rayleigh_quotient: bad axes");
  std::vector<double> x(dim, 0.0);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < samples; ++i) {
    x[d] = 2.0 * std::numbers::pi * (i + 0.5) / samples;
    const Eigen::MatrixXd g = metric(std::span<const double>(x));
    const double root = std::sqrt(g.determinant());
    num += g.inverse()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) * root;
    den += root;
  }
  return num / den;
}

/// Least-squares slope of log λ₁ against log t, and the slope of the last interval.
struct GrowthExponent {
  double least_squares = 0.0;
  double terminal = 0.0;
};

inline GrowthExponent growth_exponent(const std::vector<CollapseRow>& rows) {
  GrowthExponent g;
  const std::size_t n = rows.size();
  if (n < 2) return g;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log(r.t), y = std::log(r.lambda1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  g.least_squares = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const auto& a = rows[n - 2];
  const auto& b = rows[n - 1];
  g.terminal = std::log(b.lambda1 / a.lambda1) / std::log(b.t / a.t);
  return g;
}

}  // namespace symlab
