#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "dna/types.hpp"

namespace dna {

struct Optimum {
  Vector x;
  double value = 0;
};

/// Smooth objective with exact value/gradient oracles. Instances are
/// immutable after construction; every oracle is pure.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Index dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual std::pair<double, Vector> value_and_gradient(const Vector& x) const {
    return {value(x), gradient(x)};
  }

  /// Lipschitz constant of the gradient.
  virtual double lipschitz() const = 0;
  /// Strong-convexity modulus; 0 when the objective is merely convex.
  virtual double strong_convexity() const = 0;

  /// Closed-form minimizer when one exists. Throws OptimumUnavailable when
  /// the problem has a closed form in principle but not for this data.
  virtual std::optional<Optimum> closed_form_optimum() const { return std::nullopt; }

  /// Hessian, for problems cheap enough to form it (used to polish the
  /// numerical optimum).
  virtual std::optional<Matrix> hessian(const Vector&) const { return std::nullopt; }

  /// Cached at construction; bit-identical to gradient(0).
  const Vector& grad_at_origin() const { return grad_origin_; }

 protected:
  void cache_origin_gradient() { grad_origin_ = gradient(Vector::Zero(dimension())); }

 private:
  Vector grad_origin_;
};

/// f(x) = 1/2 ||Ax - y||^2, A is m x n.
class LeastSquaresProblem final : public Problem {
 public:
  LeastSquaresProblem(Matrix A, Vector y);

  Index dimension() const override { return A_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override;
  double lipschitz() const override { return s_max_ * s_max_; }
  double strong_convexity() const override { return full_rank_ ? s_min_ * s_min_ : 0.0; }
  std::optional<Optimum> closed_form_optimum() const override;
  std::optional<Matrix> hessian(const Vector&) const override { return A_.transpose() * A_; }

  bool full_rank() const { return full_rank_; }
  const Matrix& matrix() const { return A_; }
  const Vector& response() const { return y_; }

 private:
  Matrix A_;
  Vector y_;
  double s_max_ = 0;
  double s_min_ = 0;
  bool full_rank_ = false;
};

/// f(x) = 1/2 ||Ax - y||^2 + (mu/2) ||x||^2, mu defaults to 1/n.
class RidgeProblem final : public Problem {
 public:
  RidgeProblem(Matrix A, Vector y, std::optional<double> mu = std::nullopt);

  Index dimension() const override { return A_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override;
  double lipschitz() const override { return s_max_ * s_max_ + mu_; }
  double strong_convexity() const override { return s_min_ * s_min_ + mu_; }
  std::optional<Optimum> closed_form_optimum() const override;
  std::optional<Matrix> hessian(const Vector&) const override;

  double mu() const { return mu_; }

 private:
  Matrix A_;
  Vector y_;
  double mu_;
  double s_max_ = 0;
  double s_min_ = 0;  // zero unless A has full column rank
};

/// f(x) = sum_i softplus(-y_i <a_i, x>) + (tau/2) ||x||^2 where the samples
/// a_i are the columns of the n x m matrix A and y_i in {-1, +1}. tau
/// defaults to 1/(2m).
class LogisticProblem final : public Problem {
 public:
  LogisticProblem(Matrix A, Vector labels, std::optional<double> tau = std::nullopt);

  Index dimension() const override { return A_.rows(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override;
  double lipschitz() const override { return 0.25 * s_max_ * s_max_ + tau_; }
  double strong_convexity() const override { return tau_; }
  std::optional<Matrix> hessian(const Vector& x) const override;

  double tau() const { return tau_; }
  Index samples() const { return A_.cols(); }

 private:
  Matrix A_;
  Vector labels_;
  double tau_;
  double s_max_ = 0;
};

/// f(x) = 1/2 x'Hx + b'x + c with c chosen so that min f = 0. The value is
/// evaluated as 1/2 (x - x*)' H (x - x*), which keeps gaps nonnegative.
class QuadraticProblem final : public Problem {
 public:
  /// Minimizer x_star; b = -H x_star.
  QuadraticProblem(Matrix H, Vector x_star);
  /// f(x) = 1/2 x'Hx, minimized at the origin.
  static QuadraticProblem homogeneous(Matrix H);

  Index dimension() const override { return H_.rows(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double lipschitz() const override { return lambda_max_; }
  double strong_convexity() const override { return lambda_min_; }
  std::optional<Optimum> closed_form_optimum() const override { return Optimum{x_star_, 0.0}; }
  std::optional<Matrix> hessian(const Vector&) const override { return H_; }

  const Matrix& H() const { return H_; }
  const Vector& linear_term() const { return b_; }

 private:
  Matrix H_;
  Vector x_star_;
  Vector b_;
  double lambda_max_ = 0;
  double lambda_min_ = 0;
};

/// Minimizer of a strongly convex problem to ||grad f(x)|| <= tol. Runs
/// accelerated gradient with adaptive restart from x0 (zero by default), then
/// polishes with Newton steps when the problem exposes a Hessian. Throws
/// ConvergenceError carrying the best iterate when the budget runs out.
Optimum numerical_optimum(const Problem& p, double tol, std::optional<Vector> x0 = std::nullopt,
                          std::size_t max_iters = 200000);

/// Closed form when available, else numerical_optimum(tol). When the
/// numerical solve cannot reach tol the best iterate found is returned.
Optimum reference_optimum(const Problem& p, double tol = 1e-12);

double softplus(double t);
double sigmoid(double t);

}  // namespace dna
