#pragma once

// Small dense kernels shared by every extrapolator: a rank-revealing square
// solve, SVD helpers, weighted norms and the synthetic matrix factory.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "dna/errors.hpp"
#include "dna/types.hpp"

namespace dna {

/// Relative singular-value cutoff used by all pseudo-inverse paths.
inline constexpr double kDefaultRankTol = 1e-12;

template <typename Scalar>
struct SolveReport {
  VectorX<Scalar> solution;
  Scalar residual_norm = 0;
  Index effective_rank = 0;
  /// s_max / s_min of the system matrix; +inf when exactly singular.
  Scalar condition_estimate = 0;
  bool used_pseudoinverse = false;
};

template <typename Scalar>
struct SvdResult {
  MatrixX<Scalar> U;
  VectorX<Scalar> singular_values;
  MatrixX<Scalar> V;
};

template <typename Scalar>
struct WeightedNorms {
  Scalar euclidean;
  Scalar energy;  ///< sqrt(z' A z)
  Scalar dual;    ///< sqrt(z' A^{-1} z)
};

template <typename Scalar>
struct SyntheticSpec {
  Index rows = 0;
  Index cols = 0;
  VectorX<Scalar> singular_values;  ///< length min(rows, cols), nonincreasing, > 0
  std::uint64_t seed = 0;
};

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

}  // namespace detail

template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  if (!detail::all_finite(M)) throw ArgumentError("svd: non-finite entries");
  Eigen::JacobiSVD<MatrixX<Scalar>> dec(M.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Minimum-norm least-squares solution of M z = b with singular values below
/// rank_tol * s_max discarded.
template <typename Derived, typename Rhs>
VectorX<typename Derived::Scalar> min_norm_solve(const Eigen::MatrixBase<Derived>& M,
                                                 const Eigen::MatrixBase<Rhs>& b,
                                                 typename Derived::Scalar rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() != b.rows()) throw ArgumentError("min_norm_solve: dimension mismatch");
  if (M.size() == 0) return VectorX<Scalar>::Zero(M.cols());
  const auto dec = svd(M);
  const auto& s = dec.singular_values;
  const Scalar cutoff = rank_tol * s(0);
  VectorX<Scalar> coeffs = dec.U.transpose() * b;
  for (Index i = 0; i < s.size(); ++i) coeffs(i) = (s(i) > cutoff && s(i) > 0) ? coeffs(i) / s(i) : Scalar(0);
  return dec.V * coeffs;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> pseudo_inverse(const Eigen::MatrixBase<Derived>& M,
                                                 typename Derived::Scalar rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (M.size() == 0) return MatrixX<Scalar>::Zero(M.cols(), M.rows());
  const auto dec = svd(M);
  const auto& s = dec.singular_values;
  const Scalar cutoff = rank_tol * s(0);
  VectorX<Scalar> inv(s.size());
  for (Index i = 0; i < s.size(); ++i) inv(i) = (s(i) > cutoff && s(i) > 0) ? Scalar(1) / s(i) : Scalar(0);
  return dec.V * inv.asDiagonal() * dec.U.transpose();
}

/// Solves the square system M z = b. Well-conditioned systems go through a
/// fully pivoted LU; numerically singular ones (s_min <= rank_tol * s_max)
/// fall back to the truncated-SVD minimum-norm solution and say so in the
/// report. Never throws on singularity.
template <typename Derived, typename Rhs>
SolveReport<typename Derived::Scalar> solve_square(const Eigen::MatrixBase<Derived>& M,
                                                   const Eigen::MatrixBase<Rhs>& b,
                                                   typename Derived::Scalar rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  const Index k = M.rows();
  if (k < 1 || M.cols() != k) throw ArgumentError("solve_square: matrix must be square and non-empty");
  if (b.rows() != k || b.cols() != 1) throw ArgumentError("solve_square: right-hand side has wrong size");
  if (!detail::all_finite(M) || !detail::all_finite(b)) throw ArgumentError("solve_square: non-finite input");

  const MatrixX<Scalar> A = M;
  const VectorX<Scalar> rhs = b;
  const auto dec = svd(A);
  const auto& s = dec.singular_values;
  const Scalar s_max = s(0);
  const Scalar s_min = s(k - 1);

  SolveReport<Scalar> report;
  report.condition_estimate =
      s_min > 0 ? s_max / s_min : std::numeric_limits<Scalar>::infinity();
  const Scalar cutoff = rank_tol * s_max;
  report.effective_rank = 0;
  for (Index i = 0; i < k; ++i)
    if (s(i) > cutoff && s(i) > 0) ++report.effective_rank;

  if (report.effective_rank == k) {
    report.solution = A.fullPivLu().solve(rhs);
  } else {
    VectorX<Scalar> coeffs = dec.U.transpose() * rhs;
    for (Index i = 0; i < k; ++i) coeffs(i) = i < report.effective_rank ? coeffs(i) / s(i) : Scalar(0);
    report.solution = dec.V * coeffs;
    report.used_pseudoinverse = true;
  }
  report.residual_norm = (A * report.solution - rhs).norm();
  return report;
}

/// Minimum-norm least squares for a rectangular system, with the same report
/// as solve_square. used_pseudoinverse is set whenever M is column-rank
/// deficient at rank_tol.
template <typename Derived, typename Rhs>
SolveReport<typename Derived::Scalar> least_squares(const Eigen::MatrixBase<Derived>& M,
                                                    const Eigen::MatrixBase<Rhs>& b,
                                                    typename Derived::Scalar rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() != b.rows() || b.cols() != 1) throw ArgumentError("least_squares: dimension mismatch");
  if (!detail::all_finite(M) || !detail::all_finite(b)) throw ArgumentError("least_squares: non-finite input");
  SolveReport<Scalar> report;
  const Index k = M.cols();
  if (k == 0) {
    report.solution = VectorX<Scalar>::Zero(0);
    report.residual_norm = b.norm();
    return report;
  }
  const MatrixX<Scalar> A = M;
  const VectorX<Scalar> rhs = b;
  const auto dec = svd(A);
  const auto& s = dec.singular_values;
  const Scalar cutoff = rank_tol * s(0);
  VectorX<Scalar> coeffs = dec.U.transpose() * rhs;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0) {
      coeffs(i) /= s(i);
      ++report.effective_rank;
    } else {
      coeffs(i) = 0;
    }
  }
  report.solution = dec.V * coeffs;
  const Scalar s_min = s(s.size() - 1);
  report.condition_estimate = (A.rows() >= k && s_min > 0) ? s(0) / s_min : std::numeric_limits<Scalar>::infinity();
  report.used_pseudoinverse = report.effective_rank < k;
  report.residual_norm = (A * report.solution - rhs).norm();
  return report;
}

/// s_max / s_min, or +inf when M lacks full column rank.
template <typename Derived>
typename Derived::Scalar condition_number(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  if (M.cols() == 0 || M.rows() < M.cols()) return inf;
  const auto s = svd(M).singular_values;
  const Scalar s_max = s(0);
  const Scalar s_min = s(s.size() - 1);
  const Scalar floor = std::numeric_limits<Scalar>::epsilon() * Scalar(std::max(M.rows(), M.cols())) * s_max;
  if (!(s_min > floor)) return inf;
  return s_max / s_min;
}

/// Geometric spectrum from kappa down to 1 (length p).
template <typename Scalar = double>
VectorX<Scalar> geometric_singular_values(Index p, Scalar kappa) {
  if (p < 1 || !(kappa >= 1)) throw ArgumentError("geometric_singular_values: need p >= 1 and kappa >= 1");
  VectorX<Scalar> s(p);
  for (Index i = 0; i < p; ++i) {
    const Scalar t = p == 1 ? Scalar(0) : Scalar(i) / Scalar(p - 1);
    s(i) = std::pow(kappa, Scalar(1) - t);
  }
  s(p - 1) = 1;
  return s;
}

template <typename Scalar>
void validate(const SyntheticSpec<Scalar>& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw ArgumentError("SyntheticSpec: dimensions must be positive");
  const Index p = std::min(spec.rows, spec.cols);
  if (spec.singular_values.size() != p)
    throw ArgumentError("SyntheticSpec: need min(m, n) = " + std::to_string(p) + " singular values");
  for (Index i = 0; i < p; ++i) {
    if (!(spec.singular_values(i) > 0) || !std::isfinite(spec.singular_values(i)))
      throw ArgumentError("SyntheticSpec: singular values must be positive and finite");
    if (i > 0 && spec.singular_values(i) > spec.singular_values(i - 1))
      throw ArgumentError("SyntheticSpec: singular values must be nonincreasing");
  }
}

/// Orthonormal m x p factor from the QR of a seeded Gaussian matrix.
template <typename Scalar, typename Rng>
MatrixX<Scalar> random_orthonormal(Index m, Index p, Rng& rng) {
  std::normal_distribution<Scalar> normal(0, 1);
  MatrixX<Scalar> G(m, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < m; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(G);
  return qr.householderQ() * MatrixX<Scalar>::Identity(m, p);
}

/// A = U diag(s) V' with seeded orthonormal U, V. Bit-identical for equal specs.
template <typename Scalar>
MatrixX<Scalar> make_conditioned_matrix(const SyntheticSpec<Scalar>& spec) {
  validate(spec);
  const Index p = std::min(spec.rows, spec.cols);
  std::mt19937_64 rng(spec.seed);
  const MatrixX<Scalar> U = random_orthonormal<Scalar>(spec.rows, p, rng);
  const MatrixX<Scalar> V = random_orthonormal<Scalar>(spec.cols, p, rng);
  return U * spec.singular_values.asDiagonal() * V.transpose();
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& A, typename Derived::Scalar tol = 1e-12) {
  using Scalar = typename Derived::Scalar;
  if (A.rows() != A.cols()) return false;
  const Scalar scale = std::max<Scalar>(Scalar(1), A.cwiseAbs().maxCoeff());
  return (A - A.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// (||z||, ||z||_A, ||z||_{A^{-1}}) for SPD A. The dual norm goes through a
/// Cholesky solve, never an explicit inverse.
template <typename DerivedZ, typename DerivedA>
WeightedNorms<typename DerivedZ::Scalar> weighted_norms(const Eigen::MatrixBase<DerivedZ>& z,
                                                        const Eigen::MatrixBase<DerivedA>& A) {
  using Scalar = typename DerivedZ::Scalar;
  if (A.rows() != z.rows()) throw ArgumentError("weighted_norms: dimension mismatch");
  if (!is_symmetric(A)) throw ArgumentError("weighted_norms: matrix is not symmetric");
  const MatrixX<Scalar> sym = (A + A.transpose()) / Scalar(2);
  Eigen::LLT<MatrixX<Scalar>> llt(sym);
  if (llt.info() != Eigen::Success) throw ArgumentError("weighted_norms: matrix is not positive definite");
  const VectorX<Scalar> zz = z;
  const Scalar energy = std::sqrt(std::max<Scalar>(0, zz.dot(sym * zz)));
  const Scalar dual = std::sqrt(std::max<Scalar>(0, zz.dot(llt.solve(zz))));
  return {zz.norm(), energy, dual};
}

/// A^p for symmetric A via eigendecomposition of its symmetric part;
/// eigenvalues are clamped from below at `floor` before the power is taken.
template <typename Derived>
MatrixX<typename Derived::Scalar> symmetric_power(const Eigen::MatrixBase<Derived>& A,
                                                  typename Derived::Scalar exponent,
                                                  typename Derived::Scalar floor = 1e-14) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> sym = (A + A.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(sym);
  VectorX<Scalar> lambda = eig.eigenvalues().cwiseMax(floor);
  for (Index i = 0; i < lambda.size(); ++i) lambda(i) = std::pow(lambda(i), exponent);
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace dna
