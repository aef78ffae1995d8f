#pragma once

// Closed forms for extrapolating GD iterates on f(x) = 1/2 x'Ax, A SPD.
// With X = [x_0 ... x_K] and R~ = AX:
//
//   f_D  = 0
//   f_D1 = 1 / (2 * 1'(X'AX)^{-1} 1)
//   f_R  = w'(X'AX)w / (2 (1'w)^2),   w = (X'A^2X)^{-1} 1
//
//   f_R / f_D1 = ||z||^2_{A^-1} ||y||^2 / ||z||^4
//             <= ||z||^2_{A^-1} ||z||^2_A / ||z||^4 = U_R(z) <= kappa(A)
//
// where z = ((AX)^+)' 1 and y = ((A^{1/2}X)^+)' 1.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dna/errors.hpp"
#include "dna/linalg.hpp"
#include "dna/types.hpp"

namespace dna::oracle {

template <typename Scalar>
struct QuadraticCase {
  MatrixX<Scalar> A;
  MatrixX<Scalar> X;
  MatrixX<Scalar> A_half;
  MatrixX<Scalar> A_inv_half;
  VectorX<Scalar> z;  ///< ((AX)^+)' 1
  VectorX<Scalar> y;  ///< ((A^{1/2}X)^+)' 1
};

template <typename Scalar>
struct ClosedFormValues {
  Scalar f_dna = 0;
  Scalar f_dna1 = 0;
  Scalar f_rna = 0;
};

template <typename Scalar>
struct RatioBounds {
  Scalar ratio = 0;           ///< f_R / f_D1 from the closed forms
  Scalar ratio_identity = 0;  ///< ||z||^2_{A^-1} ||y||^2 / ||z||^4
  Scalar upper = 0;           ///< U_R(z)
  Scalar kappa = 0;           ///< lambda_max(A) / lambda_min(A)
};

template <typename Scalar>
struct PinvCheck {
  Scalar matrix_error = 0;  ///< max |(A^{1/2}X)^+ A^{-1/2} ((AX)^+)' - (X'A^2X)^{-1}|
  Scalar matrix_scale = 0;  ///< max |(X'A^2X)^{-1}|
  Scalar inner_error = 0;   ///< |y'A^{-1/2}z - z'z|
  Scalar inner_scale = 0;   ///< z'z

  bool passed(Scalar tol = Scalar(1e-8)) const {
    return matrix_error <= tol * matrix_scale && inner_error <= tol * inner_scale;
  }
};

/// Validates A (symmetric to 1e-12, positive definite) and X (full column
/// rank at 1e-10) and precomputes A^{+-1/2}, z and y. Throws RankError or
/// ArgumentError on violation.
template <typename Scalar>
QuadraticCase<Scalar> make_case(MatrixX<Scalar> A, MatrixX<Scalar> X) {
  if (A.rows() != A.cols() || A.rows() != X.rows() || X.cols() < 1)
    throw ArgumentError("QuadraticCase: A must be n x n and X n x (K+1)");
  if (!is_symmetric(A)) throw ArgumentError("QuadraticCase: A is not symmetric");
  if (Eigen::LLT<MatrixX<Scalar>>(A).info() != Eigen::Success)
    throw ArgumentError("QuadraticCase: A is not positive definite");
  const auto s = svd(X).singular_values;
  if (X.cols() > X.rows() || !(s(s.size() - 1) > Scalar(1e-10) * s(0)))
    throw RankError("QuadraticCase: iterates are not linearly independent");

  QuadraticCase<Scalar> q;
  q.A_half = symmetric_power(A, Scalar(0.5));
  q.A_inv_half = symmetric_power(A, Scalar(-0.5));
  const VectorX<Scalar> ones = VectorX<Scalar>::Ones(X.cols());
  q.z = pseudo_inverse(MatrixX<Scalar>(A * X)).transpose() * ones;
  q.y = pseudo_inverse(MatrixX<Scalar>(q.A_half * X)).transpose() * ones;
  q.A = std::move(A);
  q.X = std::move(X);
  return q;
}

namespace detail {

// Solves G w = 1 for an SPD Gram matrix, RankError when it is numerically singular.
template <typename Scalar>
VectorX<Scalar> gram_solve_ones(const MatrixX<Scalar>& G, const char* name) {
  Eigen::LDLT<MatrixX<Scalar>> ldlt(G);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw RankError(std::string("closed forms: ") + name + " is singular");
  const auto s = svd(G).singular_values;
  if (!(s(s.size() - 1) > std::numeric_limits<Scalar>::epsilon() * s(0)))
    throw RankError(std::string("closed forms: ") + name + " is numerically singular");
  return ldlt.solve(VectorX<Scalar>::Ones(G.rows()));
}

}  // namespace detail

template <typename Scalar>
ClosedFormValues<Scalar> closed_form_values(const QuadraticCase<Scalar>& q) {
  const MatrixX<Scalar> AX = q.A * q.X;
  const MatrixX<Scalar> G1 = q.X.transpose() * AX;
  const MatrixX<Scalar> G2 = AX.transpose() * AX;
  ClosedFormValues<Scalar> v;
  v.f_dna = 0;
  v.f_dna1 = Scalar(1) / (Scalar(2) * detail::gram_solve_ones(G1, "X'AX").sum());
  const VectorX<Scalar> w = detail::gram_solve_ones(G2, "X'A^2X");
  const Scalar total = w.sum();
  v.f_rna = w.dot(G1 * w) / (Scalar(2) * total * total);
  return v;
}

/// ||z||^2_{A^-1} ||z||^2_A / ||z||^4 for any nonzero z.
template <typename Scalar>
Scalar kantorovich_ratio(const VectorX<Scalar>& z, const MatrixX<Scalar>& A) {
  const auto norms = weighted_norms(z, A);
  const Scalar e2 = norms.euclidean * norms.euclidean;
  if (!(e2 > 0)) throw ArgumentError("kantorovich_ratio: z must be nonzero");
  return (norms.dual * norms.dual) * (norms.energy * norms.energy) / (e2 * e2);
}

template <typename Scalar>
RatioBounds<Scalar> ratio_and_bounds(const QuadraticCase<Scalar>& q) {
  const auto values = closed_form_values(q);
  if (!(values.f_dna1 > 0)) throw RankError("ratio_and_bounds: f_D1 must be positive");
  RatioBounds<Scalar> r;
  r.ratio = values.f_rna / values.f_dna1;
  const auto norms = weighted_norms(q.z, q.A);
  const Scalar z2 = norms.euclidean * norms.euclidean;
  r.ratio_identity = norms.dual * norms.dual * q.y.squaredNorm() / (z2 * z2);
  r.upper = kantorovich_ratio(q.z, q.A);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(q.A, Eigen::EigenvaluesOnly);
  r.kappa = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  return r;
}

template <typename Scalar>
PinvCheck<Scalar> pinv_identity_check(const QuadraticCase<Scalar>& q) {
  const MatrixX<Scalar> AX = q.A * q.X;
  const MatrixX<Scalar> lhs =
      pseudo_inverse(MatrixX<Scalar>(q.A_half * q.X)) * q.A_inv_half * pseudo_inverse(AX).transpose();
  const MatrixX<Scalar> G2 = AX.transpose() * AX;
  const MatrixX<Scalar> rhs = G2.ldlt().solve(MatrixX<Scalar>::Identity(G2.rows(), G2.cols()));
  PinvCheck<Scalar> c;
  c.matrix_error = (lhs - rhs).cwiseAbs().maxCoeff();
  c.matrix_scale = rhs.cwiseAbs().maxCoeff();
  c.inner_scale = q.z.squaredNorm();
  c.inner_error = std::abs(q.y.dot(q.A_inv_half * q.z) - c.inner_scale);
  return c;
}

/// lambda_max * kappa * 2 xi^k / (1 + xi^{2k}) * ||x0 - x*||^2 with
/// xi = (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)).
template <typename Scalar>
Scalar rate_bound(Scalar L, Scalar mu, Scalar initial_distance_sq, int k) {
  if (!(mu > 0) || !(L >= mu)) throw ArgumentError("rate_bound: need L >= mu > 0");
  if (k < 0) throw ArgumentError("rate_bound: k must be nonnegative");
  const Scalar xi = (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu));
  const Scalar xk = std::pow(xi, Scalar(k));
  return L * (L / mu) * (Scalar(2) * xk / (Scalar(1) + xk * xk)) * initial_distance_sq;
}

template <typename Scalar>
Scalar rate_bound(const MatrixX<Scalar>& H, const VectorX<Scalar>& x0_minus_xstar, int k) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(H, Eigen::EigenvaluesOnly);
  return rate_bound(eig.eigenvalues().maxCoeff(), eig.eigenvalues().minCoeff(), x0_minus_xstar.squaredNorm(), k);
}

/// Same as rate_bound(H, x0 - x*, k) for the homogeneous case x* = 0.
template <typename Scalar>
Scalar rate_bound(const QuadraticCase<Scalar>& q, const VectorX<Scalar>& x0, int k) {
  return rate_bound<Scalar>(q.A, x0, k);
}

// ---------------------------------------------------------------------------
// Seeded corpus of (A, GD window) cases and the checks run over it.

struct CorpusOptions {
  Index min_dim = 4;
  Index max_dim = 12;
  Index max_window = 4;  ///< K+1
  std::vector<double> kappas{10.0, 100.0, 1000.0};
  double max_gram_condition = 1e10;
};

struct CorpusCase {
  Matrix A;
  Matrix iterates;  ///< x_0..x_{K+1} from GD with alpha = 1/lambda_max(A)
  double alpha = 0;
  double gram_condition = 0;

  Matrix X() const { return iterates.leftCols(iterates.cols() - 1); }
};

/// SPD matrix Q diag(lambda) Q' with lambda spanning [1, kappa] log-uniformly
/// (both ends included).
Matrix random_spd(Index n, double kappa, std::uint64_t seed);

std::vector<CorpusCase> make_corpus(std::size_t count, std::uint64_t seed, const CorpusOptions& opts = {});

struct CheckRow {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0;  ///< worst observed value of the checked quantity
  double tolerance = 0;

  bool passed() const { return cases > 0 && failures == 0; }
};

/// Runs every closed-form, ratio and identity check over the corpus.
std::vector<CheckRow> run_oracle_checks(const std::vector<CorpusCase>& corpus);

}  // namespace dna::oracle
