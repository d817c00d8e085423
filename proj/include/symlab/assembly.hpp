// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symlab/grid.hpp"
#include "symlab/tensor_fields.hpp"

namespace symlab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class OperatorKind { laplace_beltrami, sub_laplacian, custom };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::laplace_beltrami: return "laplace_beltrami";
    case OperatorKind::sub_laplacian: return "sub_laplacian";
    default: return "custom";
  }
}

/// Symmetric positive semidefinite weak-form operator fᵀAf ≈ energy of f.
struct StiffnessOperator {
  SparseMatrix matrix;
  OperatorKind kind = OperatorKind::custom;

  Eigen::Index size() const { return matrix.rows(); }

  double asymmetry() const {
    const SparseMatrix diff = matrix - SparseMatrix(matrix.transpose());
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (int k = 0; k < matrix.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
  }
};

/// Diagonal (lumped) mass: canonical volume density times node quadrature weight.
struct MassWeights {
  Eigen::VectorXd weights;

  double total() const { return weights.sum(); }
};

class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndefiniteMetric : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Assembles  E(f) = ½ Σ_± Σ_x w · G_±(x)ᵀ A(x) G_±(x)
/// where G_+ (G_−) is the vector of forward (backward) differences at node x and A(x) is the
/// density-weighted inverse metric (or any PSD coefficient field) sampled at the node.
/// Each half is PSD by construction; their average cancels the O(h) location error of
/// one-sided differences, so the quadratic form is second-order accurate.
template <class CoeffFn, class DensityFn>
std::pair<StiffnessOperator, MassWeights> assemble_weak_form(const UniformGrid& grid, CoeffFn&& coeff,
                                                             DensityFn&& density, OperatorKind kind) {
  const std::size_t m = grid.dim();
  const std::size_t nodes = grid.node_count();
  const double w = grid.cell_volume();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nodes * 2 * (m + 1) * (m + 1));
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.dof_count()));

  std::vector<std::size_t> nb(m);
  Eigen::VectorXd s(static_cast<Eigen::Index>(m));
  for (std::size_t node = 0; node < nodes; ++node) {
    const auto x = grid.coordinates(node);
    const Eigen::MatrixXd A = coeff(std::span<const double>(x));
    mass[static_cast<Eigen::Index>(grid.dof(node))] += density(std::span<const double>(x)) * grid.node_weight(node);
    for (int sign : {+1, -1}) {
      bool complete = true;
      for (std::size_t i = 0; i < m && complete; ++i) {
        complete = grid.neighbour(node, i, sign, nb[i]);
        s[static_cast<Eigen::Index>(i)] = sign / grid.axis(i).spacing();
      }
      if (!complete) continue;
      // local stencil [node, nb_0, …, nb_{m−1}], gradient D = [−s | diag(s)]
      const Eigen::MatrixXd SAS = 0.5 * w * s.asDiagonal() * A * s.asDiagonal();
      const auto self = grid.dof(node);
      double self_total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto di = grid.dof(nb[i]);
        double row_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double c = SAS(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (c == 0.0) continue;
          trips.emplace_back(static_cast<int>(di), static_cast<int>(grid.dof(nb[j])), c);
          row_sum += c;
        }
        if (row_sum != 0.0) {
          trips.emplace_back(static_cast<int>(di), static_cast<int>(self), -row_sum);
          trips.emplace_back(static_cast<int>(self), static_cast<int>(di), -row_sum);
        }
        self_total += row_sum;
      }
      if (self_total != 0.0) trips.emplace_back(static_cast<int>(self), static_cast<int>(self), self_total);
    }
  }
  const auto n = static_cast<Eigen::Index>(grid.dof_count());
  StiffnessOperator op{SparseMatrix(n, n), kind};
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return {std::move(op), MassWeights{std::move(mass)}};
}

inline void require_resolution(const UniformGrid& grid, int max_frequency) {
  for (const auto& a : grid.axes()) {
    if (a.periodic && a.cells < 2 * max_frequency + 2)
      throw ResolutionError("grid with " + std::to_string(a.cells) + " cells cannot resolve frequency " +
                            std::to_string(max_frequency));
  }
}

/// Laplace–Beltrami pair for a metric given pointwise (any callable x ↦ g(x)).
/// Energy ∫ g^{ij} ∂_i f ∂_j f √det g dx; mass √det g × node weight.
template <class MetricFn>
std::pair<StiffnessOperator, MassWeights> assemble_laplace_beltrami(const MetricFn& metric, const UniformGrid& grid,
                                                                    int max_frequency = 0) {
  require_resolution(grid, max_frequency);
  auto coeff = [&](std::span<const double> x) -> Eigen::MatrixXd {
    const Eigen::MatrixXd g = metric(x);
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw IndefiniteMetric("assemble_laplace_beltrami: metric not positive definite");
    const double root_det = llt.matrixL().determinant();
    return root_det * llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
  };
  auto dens = [&](std::span<const double> x) {
    Eigen::LLT<Eigen::MatrixXd> llt(metric(x));
    return static_cast<double>(llt.matrixL().determinant());
  };
  return assemble_weak_form(grid, coeff, dens, OperatorKind::laplace_beltrami);
}

inline std::pair<StiffnessOperator, MassWeights> assemble_laplace_beltrami(const BilinearField& g,
                                                                           const UniformGrid& grid) {
  return assemble_laplace_beltrami([&](std::span<const double> x) { return g(x); }, grid,
                                   g.entries().max_frequency());
}

/// D = Σ_j D_j* D_j for D_j f = X_j·∇f, with the flat (canonical) volume.
inline StiffnessOperator assemble_sub_laplacian(const std::vector<VectorField>& fields, const UniformGrid& grid) {
  if (fields.empty()) throw std::invalid_argument("assemble_sub_laplacian: no fields");
  int top = 0;
  for (const auto& f : fields) {
    if (f.dim() != grid.dim()) throw DimensionError("assemble_sub_laplacian: dimension mismatch");
    top = std::max(top, f.max_frequency());
  }
  require_resolution(grid, top);
  auto coeff = [&](std::span<const double> x) -> Eigen::MatrixXd {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.dim()), static_cast<Eigen::Index>(grid.dim()));
    for (const auto& f : fields) {
      const Eigen::VectorXd v = f(x);
      A += v * v.transpose();
    }
    return A;
  };
  auto flat = [](std::span<const double>) { return 1.0; };
  return assemble_weak_form(grid, coeff, flat, OperatorKind::sub_laplacian).first;
}

inline MassWeights flat_mass(const UniformGrid& grid) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.dof_count()));
  for (std::size_t n = 0; n < grid.node_count(); ++n) w[static_cast<Eigen::Index>(grid.dof(n))] += grid.node_weight(n);
  return MassWeights{std::move(w)};
}

/// Coordinate triplet export: one "row col value" line per stored entry.
inline void write_triplets(std::ostream& os, const StiffnessOperator& op) {
  os.precision(17);
  for (int k = 0; k < op.matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace symlab
