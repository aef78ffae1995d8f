#include "dna/problems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dna/errors.hpp"
#include "dna/linalg.hpp"

namespace dna {

namespace {

void check_dimension(const Vector& x, Index n, const char* who) {
  if (x.size() != n)
    throw ArgumentError(std::string(who) + ": expected dimension " + std::to_string(n) + ", got " +
                        std::to_string(x.size()));
}

// Extreme singular values of A; (0, 0) for an empty matrix.
std::pair<double, double> extreme_singular_values(const Matrix& A) {
  if (A.size() == 0) return {0.0, 0.0};
  const Vector s = svd(A).singular_values;
  return {s(0), s(s.size() - 1)};
}

}  // namespace

double softplus(double t) { return std::log1p(std::exp(-std::abs(t))) + std::max(t, 0.0); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// --- least squares ---------------------------------------------------------

LeastSquaresProblem::LeastSquaresProblem(Matrix A, Vector y) : A_(std::move(A)), y_(std::move(y)) {
  if (A_.rows() != y_.size()) throw ArgumentError("LeastSquaresProblem: A and y disagree on row count");
  if (A_.cols() < 1) throw ArgumentError("LeastSquaresProblem: need at least one column");
  if (!A_.allFinite() || !y_.allFinite()) throw ArgumentError("LeastSquaresProblem: non-finite data");
  std::tie(s_max_, s_min_) = extreme_singular_values(A_);
  full_rank_ = A_.rows() >= A_.cols() && s_min_ > kDefaultRankTol * s_max_;
  cache_origin_gradient();
}

double LeastSquaresProblem::value(const Vector& x) const {
  check_dimension(x, dimension(), "LeastSquaresProblem::value");
  return 0.5 * (A_ * x - y_).squaredNorm();
}

Vector LeastSquaresProblem::gradient(const Vector& x) const {
  check_dimension(x, dimension(), "LeastSquaresProblem::gradient");
  return A_.transpose() * (A_ * x - y_);
}

std::pair<double, Vector> LeastSquaresProblem::value_and_gradient(const Vector& x) const {
  check_dimension(x, dimension(), "LeastSquaresProblem::value_and_gradient");
  const Vector r = A_ * x - y_;
  return {0.5 * r.squaredNorm(), A_.transpose() * r};
}

std::optional<Optimum> LeastSquaresProblem::closed_form_optimum() const {
  if (!full_rank_) throw OptimumUnavailable("least squares: A is rank deficient, optimum not unique");
  // QR on A itself avoids squaring the condition number through A'A.
  Vector x = A_.colPivHouseholderQr().solve(y_);
  const double f = value(x);
  return Optimum{std::move(x), f};
}

// --- ridge -----------------------------------------------------------------

RidgeProblem::RidgeProblem(Matrix A, Vector y, std::optional<double> mu)
    : A_(std::move(A)), y_(std::move(y)), mu_(0) {
  if (A_.rows() != y_.size()) throw ArgumentError("RidgeProblem: A and y disagree on row count");
  if (A_.cols() < 1) throw ArgumentError("RidgeProblem: need at least one column");
  if (!A_.allFinite() || !y_.allFinite()) throw ArgumentError("RidgeProblem: non-finite data");
  mu_ = mu.value_or(1.0 / static_cast<double>(A_.cols()));
  if (!(mu_ > 0) || !std::isfinite(mu_)) throw ArgumentError("RidgeProblem: mu must be positive");
  auto [s_max, s_min] = extreme_singular_values(A_);
  s_max_ = s_max;
  s_min_ = (A_.rows() >= A_.cols() && s_min > kDefaultRankTol * s_max) ? s_min : 0.0;
  cache_origin_gradient();
}

double RidgeProblem::value(const Vector& x) const {
  check_dimension(x, dimension(), "RidgeProblem::value");
  return 0.5 * (A_ * x - y_).squaredNorm() + 0.5 * mu_ * x.squaredNorm();
}

Vector RidgeProblem::gradient(const Vector& x) const {
  check_dimension(x, dimension(), "RidgeProblem::gradient");
  return A_.transpose() * (A_ * x - y_) + mu_ * x;
}

std::pair<double, Vector> RidgeProblem::value_and_gradient(const Vector& x) const {
  check_dimension(x, dimension(), "RidgeProblem::value_and_gradient");
  const Vector r = A_ * x - y_;
  return {0.5 * r.squaredNorm() + 0.5 * mu_ * x.squaredNorm(), A_.transpose() * r + mu_ * x};
}

std::optional<Optimum> RidgeProblem::closed_form_optimum() const {
  // (A'A + mu I)^{-1} A'y as the least-squares solution of [A; sqrt(mu) I] x = [y; 0].
  const Index m = A_.rows();
  const Index n = A_.cols();
  Matrix stacked(m + n, n);
  stacked << A_, std::sqrt(mu_) * Matrix::Identity(n, n);
  Vector rhs = Vector::Zero(m + n);
  rhs.head(m) = y_;
  Vector x = stacked.householderQr().solve(rhs);
  const double f = value(x);
  return Optimum{std::move(x), f};
}

std::optional<Matrix> RidgeProblem::hessian(const Vector&) const {
  Matrix H = A_.transpose() * A_;
  H.diagonal().array() += mu_;
  return H;
}

// --- logistic --------------------------------------------------------------

LogisticProblem::LogisticProblem(Matrix A, Vector labels, std::optional<double> tau)
    : A_(std::move(A)), labels_(std::move(labels)), tau_(0) {
  if (A_.cols() != labels_.size()) throw ArgumentError("LogisticProblem: one label per column of A");
  if (A_.rows() < 1) throw ArgumentError("LogisticProblem: need at least one feature");
  if (!A_.allFinite()) throw ArgumentError("LogisticProblem: non-finite features");
  for (Index i = 0; i < labels_.size(); ++i)
    if (labels_(i) != 1.0 && labels_(i) != -1.0)
      throw DataError("LogisticProblem: label " + std::to_string(i) + " is not in {-1, +1}");
  if (tau) {
    tau_ = *tau;
  } else {
    if (A_.cols() == 0) throw ArgumentError("LogisticProblem: tau must be given when there are no samples");
    tau_ = 1.0 / (2.0 * static_cast<double>(A_.cols()));
  }
  if (!(tau_ >= 0) || !std::isfinite(tau_)) throw ArgumentError("LogisticProblem: tau must be nonnegative");
  s_max_ = extreme_singular_values(A_).first;
  cache_origin_gradient();
}

double LogisticProblem::value(const Vector& x) const {
  check_dimension(x, dimension(), "LogisticProblem::value");
  const Vector margins = A_.transpose() * x;
  double total = 0;
  for (Index i = 0; i < margins.size(); ++i) total += softplus(-labels_(i) * margins(i));
  return total + 0.5 * tau_ * x.squaredNorm();
}

Vector LogisticProblem::gradient(const Vector& x) const {
  return value_and_gradient(x).second;
}

std::pair<double, Vector> LogisticProblem::value_and_gradient(const Vector& x) const {
  check_dimension(x, dimension(), "LogisticProblem::value_and_gradient");
  const Vector margins = A_.transpose() * x;
  Vector weights(margins.size());
  double total = 0;
  for (Index i = 0; i < margins.size(); ++i) {
    const double t = -labels_(i) * margins(i);
    total += softplus(t);
    weights(i) = -labels_(i) * sigmoid(t);
  }
  return {total + 0.5 * tau_ * x.squaredNorm(), A_ * weights + tau_ * x};
}

std::optional<Matrix> LogisticProblem::hessian(const Vector& x) const {
  check_dimension(x, dimension(), "LogisticProblem::hessian");
  const Vector margins = A_.transpose() * x;
  Vector curvature(margins.size());
  for (Index i = 0; i < margins.size(); ++i) {
    const double s = sigmoid(-labels_(i) * margins(i));
    curvature(i) = s * (1.0 - s);
  }
  Matrix H = A_ * curvature.asDiagonal() * A_.transpose();
  H.diagonal().array() += tau_;
  return H;
}

// --- quadratic -------------------------------------------------------------

QuadraticProblem::QuadraticProblem(Matrix H, Vector x_star) : H_(std::move(H)), x_star_(std::move(x_star)) {
  if (H_.rows() != H_.cols() || H_.rows() < 1) throw ArgumentError("QuadraticProblem: H must be square");
  if (x_star_.size() != H_.rows()) throw ArgumentError("QuadraticProblem: minimizer has wrong dimension");
  if (!is_symmetric(H_)) throw ArgumentError("QuadraticProblem: H must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H_, Eigen::EigenvaluesOnly);
  lambda_min_ = eig.eigenvalues()(0);
  lambda_max_ = eig.eigenvalues()(H_.rows() - 1);
  if (!(lambda_min_ > 0)) throw ArgumentError("QuadraticProblem: H must be positive definite");
  b_ = -(H_ * x_star_);
  cache_origin_gradient();
}

QuadraticProblem QuadraticProblem::homogeneous(Matrix H) {
  const Index n = H.rows();
  return QuadraticProblem(std::move(H), Vector::Zero(n));
}

double QuadraticProblem::value(const Vector& x) const {
  check_dimension(x, dimension(), "QuadraticProblem::value");
  const Vector d = x - x_star_;
  return 0.5 * d.dot(H_ * d);
}

Vector QuadraticProblem::gradient(const Vector& x) const {
  check_dimension(x, dimension(), "QuadraticProblem::gradient");
  return H_ * x + b_;
}

// --- numerical optimum -----------------------------------------------------

Optimum numerical_optimum(const Problem& p, double tol, std::optional<Vector> x0, std::size_t max_iters) {
  const Index n = p.dimension();
  const double L = p.lipschitz();
  const double mu = p.strong_convexity();
  if (!(mu > 0)) throw ArgumentError("numerical_optimum: problem must be strongly convex");
  if (!(tol > 0)) throw ArgumentError("numerical_optimum: tol must be positive");

  Vector x = x0.value_or(Vector::Zero(n));
  if (x.size() != n) throw ArgumentError("numerical_optimum: x0 has wrong dimension");

  Vector best = x;
  Vector g = p.gradient(x);
  double best_norm = g.norm();
  auto consider = [&](const Vector& candidate, double grad_norm) {
    if (grad_norm < best_norm) {
      best_norm = grad_norm;
      best = candidate;
    }
  };

  const bool has_hessian = p.hessian(x).has_value();
  // Hand over to Newton once the gradient is small; AGD alone stalls near
  // roundoff long before tol on ill-conditioned data.
  const double newton_switch = std::max(tol, 1e-6 * (1.0 + best_norm));

  if (L > 0 && best_norm > tol) {
    const double q = std::sqrt(mu / L);
    const double beta = (1.0 - q) / (1.0 + q);
    Vector x_prev = x;
    for (std::size_t it = 0; it < max_iters; ++it) {
      const Vector y = x + beta * (x - x_prev);
      const Vector gy = p.gradient(y);
      const double gy_norm = gy.norm();
      consider(y, gy_norm);
      if (gy_norm <= tol || (has_hessian && gy_norm <= newton_switch)) break;
      Vector x_next = y - gy / L;
      if (gy.dot(x_next - x) > 0) {
        x_prev = x_next;  // momentum restart
      } else {
        x_prev = x;
      }
      x = std::move(x_next);
      if (!x.allFinite()) break;
    }
  }

  if (has_hessian && best_norm > tol) {
    Vector xn = best;
    for (int it = 0; it < 100 && best_norm > tol; ++it) {
      auto [f, gn] = p.value_and_gradient(xn);
      const Matrix H = *p.hessian(xn);
      const Vector step = H.ldlt().solve(gn);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Vector trial = xn - t * step;
        auto [ft, gt] = p.value_and_gradient(trial);
        if (ft <= f - 1e-4 * t * gn.dot(step) || gt.norm() < gn.norm()) {
          xn = trial;
          consider(xn, gt.norm());
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
  }

  if (best_norm > tol)
    throw ConvergenceError("numerical_optimum: gradient norm " + std::to_string(best_norm) +
                               " above tolerance after budget",
                           best, best_norm);
  const double f_best = p.value(best);
  return Optimum{std::move(best), f_best};
}

Optimum reference_optimum(const Problem& p, double tol) {
  if (auto closed = p.closed_form_optimum()) return *closed;
  try {
    return numerical_optimum(p, tol);
  } catch (const ConvergenceError& e) {
    return Optimum{e.best_iterate(), p.value(e.best_iterate())};
  }
}

}  // namespace dna
