// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fftw3.h>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "symlab/assembly.hpp"
#include "symlab/grid.hpp"

namespace symlab {

/// Maps a block of residuals to a block of search directions.
using Preconditioner = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;   // ascending, λ₀ first
  Eigen::MatrixXd eigenvectors;  // mass-orthonormal columns
  Eigen::VectorXd residuals;     // ‖Ax − λMx‖_{M⁻¹} / (‖x‖_M · max(1, |λ|))
  int iterations = 0;
  bool converged = false;

  double lambda1() const { return eigenvalues.size() > 1 ? eigenvalues[1] : 0.0; }
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, SpectrumResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SpectrumResult& partial() const { return partial_; }

 private:
  SpectrumResult partial_;
};

struct EigensolverOptions {
  double tol = 1e-8;
  int max_iterations = 2000;
  int guard_vectors = 3;
  std::uint64_t seed = 20240917;
  bool throw_on_failure = true;
  Preconditioner preconditioner;  // identity when empty
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Mass-orthonormalises the columns of S (S ← S R) via the eigen-decomposition of SᵀMS,
/// dropping directions whose Gram eigenvalue is below drop_tol relative to the largest.
inline Eigen::MatrixXd svqb(const Eigen::MatrixXd& S, const Eigen::VectorXd& mass, double drop_tol = 1e-14) {
  if (S.cols() == 0) return S;
  Eigen::MatrixXd G = S.transpose() * mass.asDiagonal() * S;
  G = 0.5 * (G + G.transpose());
  Eigen::VectorXd d = G.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd Gs = d.asDiagonal() * G * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gs);
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > drop_tol * top) keep.push_back(i);
  Eigen::MatrixXd R(S.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    R.col(static_cast<Eigen::Index>(c)) =
        d.asDiagonal() * es.eigenvectors().col(keep[c]) / std::sqrt(es.eigenvalues()[keep[c]]);
  return S * R;
}

}  // namespace detail

/// Smallest eigenpairs of A f = λ M f (M diagonal) by block LOBPCG.
/// The constant vector is the known λ₀ = 0 eigenvector; it is returned as column 0 and
/// explicitly projected out of every iterate. `count` includes λ₀.
inline SpectrumResult lowest_eigenpairs(const StiffnessOperator& A, const MassWeights& M, int count,
                                        const EigensolverOptions& opt = {}) {
  const Eigen::Index n = A.size();
  if (M.weights.size() != n) throw std::invalid_argument("lowest_eigenpairs: mass/operator size mismatch");
  if ((M.weights.array() <= 0.0).any()) throw std::invalid_argument("lowest_eigenpairs: mass weights must be positive");
  if (count < 2 || count >= n) throw std::invalid_argument("lowest_eigenpairs: need 2 <= count < N");
  const Eigen::VectorXd& w = M.weights;

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd c0 = ones / std::sqrt(w.sum());
  auto deflate = [&](Eigen::MatrixXd& X) {
    const Eigen::RowVectorXd coef = (c0.cwiseProduct(w)).transpose() * X;
    X -= c0 * coef;
  };
  auto m_orth_against = [&](Eigen::MatrixXd& S, const Eigen::MatrixXd& X) {
    if (X.cols() == 0 || S.cols() == 0) return;
    S -= X * (X.transpose() * w.asDiagonal() * S);
  };
  auto apply_A = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd { return A.matrix * X; };

  const int want = count - 1;
  const int block = std::min<Eigen::Index>(want + std::max(0, opt.guard_vectors), n - 1);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(n, block);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = normal(rng);
  deflate(X);
  X = detail::svqb(X, w);
  deflate(X);
  X = detail::svqb(X, w);

  auto rayleigh_ritz = [&](const Eigen::MatrixXd& Q, const Eigen::MatrixXd& AQ, Eigen::MatrixXd& C,
                           Eigen::VectorXd& theta) {
    Eigen::MatrixXd H = Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    C = es.eigenvectors();
    theta = es.eigenvalues();
  };

  Eigen::MatrixXd AX = apply_A(X);
  Eigen::MatrixXd C;
  Eigen::VectorXd theta;
  rayleigh_ritz(X, AX, C, theta);
  X = X * C;
  AX = AX * C;
  Eigen::MatrixXd P(n, 0), AP(n, 0);

  SpectrumResult res;
  Eigen::VectorXd resid(block);
  const Eigen::VectorXd w_inv = w.cwiseInverse();
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    Eigen::MatrixXd R = AX - w.asDiagonal() * X * theta.head(block).asDiagonal();
    for (Eigen::Index j = 0; j < block; ++j) {
      const double rn = std::sqrt(R.col(j).cwiseAbs2().dot(w_inv));
      resid[j] = rn / std::max(1.0, std::abs(theta[j]));
    }
    if ((resid.head(want).array() <= opt.tol).all()) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd W = opt.preconditioner ? opt.preconditioner(R) : Eigen::MatrixXd(w_inv.asDiagonal() * R);
    deflate(W);
    m_orth_against(W, X);
    Eigen::MatrixXd S(n, W.cols() + P.cols());
    S << W, P;
    m_orth_against(S, X);
    S = detail::svqb(S, w);
    m_orth_against(S, X);
    deflate(S);
    S = detail::svqb(S, w);
    if (S.cols() == 0) break;

    const Eigen::MatrixXd AS = apply_A(S);
    Eigen::MatrixXd Q(n, X.cols() + S.cols()), AQ(n, X.cols() + S.cols());
    Q << X, S;
    AQ << AX, AS;
    rayleigh_ritz(Q, AQ, C, theta);
    const Eigen::MatrixXd Cb = C.leftCols(block);
    X = Q * Cb;
    AX = AQ * Cb;
    P = S * Cb.bottomRows(S.cols());
    AP = AS * Cb.bottomRows(S.cols());
    // keep P well conditioned relative to X
    Eigen::MatrixXd Pn = P;
    m_orth_against(Pn, X);
    P = Pn;
    theta.conservativeResize(block);
    if (it % 20 == 19) {
      // periodic re-orthonormalisation limits drift of the implicit M-orthonormality
      deflate(X);
      X = detail::svqb(X, w);
      AX = apply_A(X);
      Eigen::MatrixXd Ct;
      Eigen::VectorXd th;
      rayleigh_ritz(X, AX, Ct, th);
      X = X * Ct;
      AX = AX * Ct;
      theta = th;
    }
  }

  res.iterations = it;
  res.eigenvalues.resize(count);
  res.eigenvectors.resize(n, count);
  res.residuals.resize(count);
  res.eigenvectors.col(0) = c0;
  const Eigen::VectorXd Ac0 = A.matrix * c0;
  res.eigenvalues[0] = c0.dot(Ac0);
  res.residuals[0] = std::sqrt((Ac0 - res.eigenvalues[0] * w.cwiseProduct(c0)).cwiseAbs2().dot(w_inv));
  for (int j = 0; j < want; ++j) {
    res.eigenvalues[j + 1] = theta[j];
    res.eigenvectors.col(j + 1) = X.col(j);
    res.residuals[j + 1] = resid[j];
  }
  if (!res.converged && opt.throw_on_failure)
    throw ConvergenceError("lowest_eigenpairs: no convergence after " + std::to_string(it) + " iterations (max residual " +
                               detail::sci(res.residuals.maxCoeff()) + ")",
                           res);
  return res;
}

/// Dense reference: all eigenvalues of A f = λ M f via a symmetric-definite solver.
inline Eigen::VectorXd dense_generalized_spectrum(const StiffnessOperator& A, const MassWeights& M) {
  const Eigen::MatrixXd Ad = Eigen::MatrixXd(A.matrix);
  const Eigen::MatrixXd Md = M.weights.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ad + Ad.transpose()), Md);
  return es.eigenvalues();
}

/// Inverse of the constant-coefficient operator with the grid-averaged coefficient, applied
/// by FFT. The averaged operator is circulant on a periodic grid, so its symbol is
/// w·dᴴ Ā d with d_i = (e^{iθ_i} − 1)/h_i; a shift keeps the zero mode invertible.
class FftPreconditioner {
 public:
  FftPreconditioner(const UniformGrid& grid, const Eigen::MatrixXd& mean_coeff, double mean_density, double shift = 1.0)
      : n_(static_cast<std::size_t>(grid.node_count())) {
    if (!grid.all_periodic()) throw std::invalid_argument("FftPreconditioner: grid must be periodic");
    const std::size_t m = grid.dim();
    std::vector<int> dims(m);
    // FFTW expects row-major dims; our node index has axis 0 fastest.
    for (std::size_t i = 0; i < m; ++i) dims[m - 1 - i] = grid.axis(i).cells;
    state_ = std::make_shared<State>();
    state_->buf = fftw_alloc_complex(n_);
    state_->fwd = fftw_plan_dft(static_cast<int>(m), dims.data(), state_->buf, state_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
    state_->bwd = fftw_plan_dft(static_cast<int>(m), dims.data(), state_->buf, state_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    inv_symbol_.resize(n_);
    const double w = grid.cell_volume();
    Eigen::VectorXcd d(static_cast<Eigen::Index>(m));
    for (std::size_t node = 0; node < n_; ++node) {
      const auto idx = grid.multi_index(node);
      for (std::size_t i = 0; i < m; ++i) {
        const double theta = 2.0 * M_PI * idx[i] / grid.axis(i).cells;
        d[static_cast<Eigen::Index>(i)] =
            (std::complex<double>(std::cos(theta), std::sin(theta)) - 1.0) / grid.axis(i).spacing();
      }
      const double symbol = w * (d.adjoint() * mean_coeff.cast<std::complex<double>>() * d)(0, 0).real();
      inv_symbol_[node] = 1.0 / (symbol + shift * w * mean_density);
    }
  }

  Eigen::MatrixXd operator()(const Eigen::MatrixXd& R) const {
    Eigen::MatrixXd out(R.rows(), R.cols());
    fftw_complex* b = state_->buf;
    for (Eigen::Index c = 0; c < R.cols(); ++c) {
      for (std::size_t i = 0; i < n_; ++i) {
        b[i][0] = R(static_cast<Eigen::Index>(i), c);
        b[i][1] = 0.0;
      }
      fftw_execute(state_->fwd);
      for (std::size_t i = 0; i < n_; ++i) {
        b[i][0] *= inv_symbol_[i];
        b[i][1] *= inv_symbol_[i];
      }
      fftw_execute(state_->bwd);
      for (std::size_t i = 0; i < n_; ++i) out(static_cast<Eigen::Index>(i), c) = b[i][0] / static_cast<double>(n_);
    }
    return out;
  }

 private:
  // FFTW plans are not copyable; copies of the preconditioner share one state.
  struct State {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;
    State() = default;
    State(const State&) = delete;
    State& operator=(const State&) = delete;
    ~State() {
      if (fwd) fftw_destroy_plan(fwd);
      if (bwd) fftw_destroy_plan(bwd);
      if (buf) fftw_free(buf);
    }
  };
  std::size_t n_;
  std::shared_ptr<State> state_;
  std::vector<double> inv_symbol_;
};

/// Grid average of a node-sampled coefficient field, for FftPreconditioner.
template <class CoeffFn>
Eigen::MatrixXd mean_coefficient(const UniformGrid& grid, CoeffFn&& coeff) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.dim()), static_cast<Eigen::Index>(grid.dim()));
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.coordinates(node);
    acc += coeff(std::span<const double>(x));
  }
  return acc / static_cast<double>(grid.node_count());
}

/// Incomplete Cholesky of A + shift·M, for grids without an FFT structure.
class IncompleteCholeskyPreconditioner {
 public:
  IncompleteCholeskyPreconditioner(const StiffnessOperator& A, const MassWeights& M, double shift = 1.0) {
    Eigen::SparseMatrix<double> K = Eigen::SparseMatrix<double>(A.matrix);
    Eigen::SparseMatrix<double> D(K.rows(), K.cols());
    D.reserve(Eigen::VectorXi::Constant(K.rows(), 1));
    for (Eigen::Index i = 0; i < K.rows(); ++i) D.insert(i, i) = shift * M.weights[i];
    K += D;
    ic_ = std::make_shared<Eigen::IncompleteCholesky<double>>(K);
    if (ic_->info() != Eigen::Success) throw std::runtime_error("IncompleteCholeskyPreconditioner: factorisation failed");
  }

  Eigen::MatrixXd operator()(const Eigen::MatrixXd& R) const {
    Eigen::MatrixXd out(R.rows(), R.cols());
    for (Eigen::Index c = 0; c < R.cols(); ++c) out.col(c) = ic_->solve(R.col(c));
    return out;
  }

 private:
  std::shared_ptr<Eigen::IncompleteCholesky<double>> ic_;
};

}  // namespace symlab
