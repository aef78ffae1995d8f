#pragma once

// Extrapolators over a window of iterates x_0..x_{K+1}: each one picks
// coefficients c in R^{K+1} and returns the combination X c with
// X = [x_0 ... x_K].
//
//   RNA    (R~'R~ + lambda I) z = 1,                    c = z / 1'z
//   DNA    X'R z = -X'g0
//   DNA-1  X'R~ z = 1,                                  c = z / 1'z
//   DNA-2  (X'R + lambda X'X + eps I) z = lambda X'y - X'g0
//   DNA-3  (X'R + lambda I) z = lambda e - X'g0
//
// where R~_i = (x_i - x_{i+1}) / alpha_i, g0 = grad f(0) and R = R~ - g0 1'.
// For GD iterates on a quadratic, R c + g0 is exactly grad f(X c).

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dna/errors.hpp"
#include "dna/linalg.hpp"
#include "dna/types.hpp"

namespace dna {

enum class Method { RNA, DNA, DNA1, DNA2, DNA3, Anderson };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::RNA: return "rna";
    case Method::DNA: return "dna";
    case Method::DNA1: return "dna1";
    case Method::DNA2: return "dna2";
    case Method::DNA3: return "dna3";
    case Method::Anderson: return "anderson";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::RNA, Method::DNA, Method::DNA1, Method::DNA2, Method::DNA3, Method::Anderson})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

/// Reference point e for DNA-3's penalty ||c - e||^2.
enum class CoefficientReference { LastIterateIndicator, Zero, Uniform, Custom };

template <typename Scalar>
struct IterateWindow {
  MatrixX<Scalar> iterates;   ///< n x (K+2), columns x_0..x_{K+1}
  VectorX<Scalar> stepsizes;  ///< K+1 entries alpha_0..alpha_K

  Index K() const { return iterates.cols() - 2; }
  Index dimension() const { return iterates.rows(); }
};

template <typename Scalar>
struct ResidualMatrices {
  MatrixX<Scalar> X;        ///< [x_0 ... x_K]
  MatrixX<Scalar> R_tilde;  ///< columns (x_i - x_{i+1}) / alpha_i
  MatrixX<Scalar> R;        ///< R_tilde - g0 1'
  VectorX<Scalar> g0;       ///< grad f(0)
  VectorX<Scalar> stepsizes;

  Index window_size() const { return X.cols(); }
};

template <typename Scalar>
struct ExtrapolationResult {
  VectorX<Scalar> coefficients;
  VectorX<Scalar> point;
  SolveReport<Scalar> report;
  Method method = Method::DNA;
  /// Set when the normalization z'1 degenerated and c fell back to the
  /// last-iterate indicator.
  bool fallback = false;
};

template <typename Scalar>
struct ExtrapolatorConfig {
  Method method = Method::DNA1;
  Scalar lambda = Scalar(1e-8);
  Scalar epsilon = Scalar(1e-14);  ///< DNA-2 only
  /// DNA-2 reference y; empty means the last window column x_K.
  std::optional<VectorX<Scalar>> reference_point;
  CoefficientReference coefficient_reference = CoefficientReference::LastIterateIndicator;
  VectorX<Scalar> custom_coefficient_reference;  ///< used with CoefficientReference::Custom
  bool symmetrize = false;                       ///< DNA-2: replace X'R by its symmetric part
};

template <typename Scalar>
void validate(const IterateWindow<Scalar>& w) {
  if (w.iterates.cols() < 2) throw ArgumentError("IterateWindow: need at least two iterates");
  if (w.stepsizes.size() != w.iterates.cols() - 1)
    throw ArgumentError("IterateWindow: need one stepsize per consecutive pair of iterates");
  for (Index i = 0; i < w.stepsizes.size(); ++i)
    if (!(w.stepsizes(i) > 0) || !std::isfinite(w.stepsizes(i)))
      throw ArgumentError("IterateWindow: stepsizes must be positive");
}

template <typename Scalar>
ResidualMatrices<Scalar> build_residuals(const IterateWindow<Scalar>& w, const VectorX<Scalar>& g0) {
  validate(w);
  if (g0.size() != w.dimension()) throw ArgumentError("build_residuals: g0 has wrong dimension");
  const Index cols = w.K() + 1;
  ResidualMatrices<Scalar> rm;
  rm.X = w.iterates.leftCols(cols);
  rm.R_tilde.resize(w.dimension(), cols);
  for (Index i = 0; i < cols; ++i)
    rm.R_tilde.col(i) = (w.iterates.col(i) - w.iterates.col(i + 1)) / w.stepsizes(i);
  rm.R = rm.R_tilde.colwise() - g0;
  rm.g0 = g0;
  rm.stepsizes = w.stepsizes;
  return rm;
}

/// Residual matrices from base points and their gradients directly, for
/// schedules whose iterates are not a single GD chain.
template <typename Scalar>
ResidualMatrices<Scalar> residuals_from_gradients(MatrixX<Scalar> X, MatrixX<Scalar> gradients,
                                                  const VectorX<Scalar>& g0, VectorX<Scalar> stepsizes) {
  if (X.cols() < 1 || X.rows() != gradients.rows() || X.cols() != gradients.cols())
    throw ArgumentError("residuals_from_gradients: X and gradients must have the same nonzero shape");
  if (g0.size() != X.rows()) throw ArgumentError("residuals_from_gradients: g0 has wrong dimension");
  if (stepsizes.size() != X.cols()) throw ArgumentError("residuals_from_gradients: one stepsize per column");
  ResidualMatrices<Scalar> rm;
  rm.R = gradients.colwise() - g0;
  rm.R_tilde = std::move(gradients);
  rm.X = std::move(X);
  rm.g0 = g0;
  rm.stepsizes = std::move(stepsizes);
  return rm;
}

template <typename DerivedX, typename DerivedC>
VectorX<typename DerivedX::Scalar> extrapolate_point(const Eigen::MatrixBase<DerivedX>& X,
                                                     const Eigen::MatrixBase<DerivedC>& c) {
  if (X.cols() != c.rows() || c.cols() != 1) throw ArgumentError("extrapolate_point: dimension mismatch");
  return X * c;
}

namespace detail {

template <typename Scalar>
VectorX<Scalar> last_indicator(Index size) {
  VectorX<Scalar> e = VectorX<Scalar>::Zero(size);
  e(size - 1) = 1;
  return e;
}

// c = z / 1'z, or the last-iterate indicator when |1'z| < 1e-14 ||z||.
template <typename Scalar>
ExtrapolationResult<Scalar> normalized(const ResidualMatrices<Scalar>& rm, SolveReport<Scalar> report,
                                       Method method) {
  ExtrapolationResult<Scalar> out;
  out.method = method;
  const VectorX<Scalar>& z = report.solution;
  const Scalar total = z.sum();
  if (std::abs(total) > Scalar(1e-14) * z.norm() && std::isfinite(total)) {
    out.coefficients = z / total;
  } else {
    out.coefficients = last_indicator<Scalar>(rm.window_size());
    out.fallback = true;
  }
  out.point = rm.X * out.coefficients;
  out.report = std::move(report);
  return out;
}

template <typename Scalar>
ExtrapolationResult<Scalar> direct(const ResidualMatrices<Scalar>& rm, SolveReport<Scalar> report, Method method) {
  ExtrapolationResult<Scalar> out;
  out.method = method;
  out.coefficients = report.solution;
  out.point = rm.X * out.coefficients;
  out.report = std::move(report);
  return out;
}

}  // namespace detail

template <typename Scalar>
ExtrapolationResult<Scalar> rna_coefficients(const ResidualMatrices<Scalar>& rm, Scalar lambda) {
  if (!(lambda >= 0)) throw ArgumentError("rna_coefficients: lambda must be nonnegative");
  const Index k = rm.window_size();
  MatrixX<Scalar> M = rm.R_tilde.transpose() * rm.R_tilde;
  M.diagonal().array() += lambda;
  return detail::normalized(rm, solve_square(M, VectorX<Scalar>::Ones(k)), Method::RNA);
}

template <typename Scalar>
ExtrapolationResult<Scalar> dna_coefficients(const ResidualMatrices<Scalar>& rm) {
  const MatrixX<Scalar> M = rm.X.transpose() * rm.R;
  const VectorX<Scalar> b = -(rm.X.transpose() * rm.g0);
  return detail::direct(rm, solve_square(M, b), Method::DNA);
}

template <typename Scalar>
ExtrapolationResult<Scalar> dna1_coefficients(const ResidualMatrices<Scalar>& rm) {
  const Index k = rm.window_size();
  const MatrixX<Scalar> M = rm.X.transpose() * rm.R_tilde;
  return detail::normalized(rm, solve_square(M, VectorX<Scalar>::Ones(k)), Method::DNA1);
}

template <typename Scalar>
ExtrapolationResult<Scalar> dna2_coefficients(const ResidualMatrices<Scalar>& rm, Scalar lambda,
                                              const VectorX<Scalar>& reference, Scalar epsilon,
                                              bool symmetrize = false) {
  if (!(lambda >= 0) || !(epsilon >= 0)) throw ArgumentError("dna2_coefficients: lambda and epsilon must be nonnegative");
  if (reference.size() != rm.X.rows()) throw ArgumentError("dna2_coefficients: reference point has wrong dimension");
  MatrixX<Scalar> XtR = rm.X.transpose() * rm.R;
  if (symmetrize) XtR = ((XtR + XtR.transpose()) / Scalar(2)).eval();
  MatrixX<Scalar> M = XtR + lambda * (rm.X.transpose() * rm.X);
  M.diagonal().array() += epsilon;
  const VectorX<Scalar> b = lambda * (rm.X.transpose() * reference) - rm.X.transpose() * rm.g0;
  return detail::direct(rm, solve_square(M, b), Method::DNA2);
}

template <typename Scalar>
ExtrapolationResult<Scalar> dna3_coefficients(const ResidualMatrices<Scalar>& rm, Scalar lambda,
                                              const VectorX<Scalar>& reference) {
  if (!(lambda >= 0)) throw ArgumentError("dna3_coefficients: lambda must be nonnegative");
  if (reference.size() != rm.window_size())
    throw ArgumentError("dna3_coefficients: coefficient reference has wrong length");
  MatrixX<Scalar> M = rm.X.transpose() * rm.R;
  M.diagonal().array() += lambda;
  const VectorX<Scalar> b = lambda * reference - rm.X.transpose() * rm.g0;
  return detail::direct(rm, solve_square(M, b), Method::DNA3);
}

template <typename Scalar>
VectorX<Scalar> coefficient_reference(const ExtrapolatorConfig<Scalar>& cfg, Index window_size) {
  switch (cfg.coefficient_reference) {
    case CoefficientReference::LastIterateIndicator: return detail::last_indicator<Scalar>(window_size);
    case CoefficientReference::Zero: return VectorX<Scalar>::Zero(window_size);
    case CoefficientReference::Uniform: return VectorX<Scalar>::Constant(window_size, Scalar(1) / Scalar(window_size));
    case CoefficientReference::Custom:
      if (cfg.custom_coefficient_reference.size() != window_size)
        throw ArgumentError("coefficient_reference: custom reference has wrong length");
      return cfg.custom_coefficient_reference;
  }
  throw ArgumentError("coefficient_reference: unknown kind");
}

// ---------------------------------------------------------------------------
// Anderson acceleration

template <typename Scalar>
struct AndersonStep {
  VectorX<Scalar> next;
  VectorX<Scalar> coefficients;
  SolveReport<Scalar> report;
  bool fallback = false;
};

/// One Anderson update from the last m_k+1 map evaluations. Column i of
/// `images` is Phi(x_{k-m_k+i}); column i of `residuals` is
/// Phi(x_{k-m_k+i}) - x_{k-m_k+i}. Solves min ||F c|| subject to sum(c) = 1
/// and returns sum_i c_i Phi(x_{k-m_k+i}).
///
/// The constraint is eliminated by writing F c = f_k - D g with
/// D_j = f_k - f_j, and g comes from a truncated-SVD minimum-norm least
/// squares solve. When every residual is zero the step falls back to the
/// plain fixed-point update Phi(x_k) and is flagged.
template <typename Scalar>
AndersonStep<Scalar> anderson_step(const MatrixX<Scalar>& images, const MatrixX<Scalar>& residuals,
                                   Scalar rank_tol = Scalar(kDefaultRankTol)) {
  if (images.cols() < 1 || images.rows() != residuals.rows() || images.cols() != residuals.cols())
    throw ArgumentError("anderson_step: images and residuals must have the same nonzero shape");
  const Index mk = images.cols() - 1;
  const VectorX<Scalar> f_last = residuals.col(mk);
  MatrixX<Scalar> D(residuals.rows(), mk);
  for (Index j = 0; j < mk; ++j) D.col(j) = f_last - residuals.col(j);

  AndersonStep<Scalar> out;
  out.report = least_squares(D, f_last, rank_tol);
  out.coefficients.resize(mk + 1);
  out.coefficients.head(mk) = out.report.solution;
  out.coefficients(mk) = Scalar(1) - out.report.solution.sum();
  if (mk > 0 && out.report.effective_rank == 0) {
    out.coefficients = detail::last_indicator<Scalar>(mk + 1);
    out.fallback = true;
  }
  out.next = images * out.coefficients;
  return out;
}

template <typename Scalar>
struct AndersonRun {
  std::vector<VectorX<Scalar>> iterates;  ///< x_0..x_steps
  std::vector<Scalar> residual_norms;     ///< ||Phi(x_k) - x_k|| for each evaluated x_k
  Index fallbacks = 0;
};

/// Anderson acceleration with depth m on the fixed-point map phi. Stops after
/// `steps` updates or once ||Phi(x_k) - x_k|| <= tol.
template <typename Scalar, typename Map>
AndersonRun<Scalar> anderson_iterate(Map&& phi, VectorX<Scalar> x0, Index depth, Index steps, Scalar tol = 0) {
  if (depth < 0 || steps < 0) throw ArgumentError("anderson_iterate: depth and steps must be nonnegative");
  AndersonRun<Scalar> run;
  std::vector<VectorX<Scalar>> images;
  std::vector<VectorX<Scalar>> residuals;
  run.iterates.push_back(std::move(x0));
  for (Index k = 0; k <= steps; ++k) {
    const VectorX<Scalar>& xk = run.iterates.back();
    VectorX<Scalar> image = phi(xk);
    VectorX<Scalar> residual = image - xk;
    run.residual_norms.push_back(residual.norm());
    if (k == steps || run.residual_norms.back() <= tol) break;
    images.push_back(std::move(image));
    residuals.push_back(std::move(residual));
    const Index mk = std::min(depth, k);
    const Index n = xk.size();
    MatrixX<Scalar> G(n, mk + 1);
    MatrixX<Scalar> F(n, mk + 1);
    for (Index i = 0; i <= mk; ++i) {
      G.col(i) = images[images.size() - 1 - mk + i];
      F.col(i) = residuals[residuals.size() - 1 - mk + i];
    }
    auto step = anderson_step<Scalar>(G, F);
    if (step.fallback) ++run.fallbacks;
    run.iterates.push_back(std::move(step.next));
    if (static_cast<Index>(images.size()) > depth + 1) {
      images.erase(images.begin());
      residuals.erase(residuals.begin());
    }
  }
  return run;
}

/// Anderson on a GD window: the map is x -> x - alpha_i R~_i, so the images
/// are x_{i+1} and the residuals are -alpha_i R~_i.
template <typename Scalar>
ExtrapolationResult<Scalar> anderson_coefficients(const ResidualMatrices<Scalar>& rm) {
  const MatrixX<Scalar> residuals = -(rm.R_tilde * rm.stepsizes.asDiagonal());
  const MatrixX<Scalar> images = rm.X + residuals;
  auto step = anderson_step<Scalar>(images, residuals);
  ExtrapolationResult<Scalar> out;
  out.method = Method::Anderson;
  out.coefficients = std::move(step.coefficients);
  out.point = std::move(step.next);
  out.report = std::move(step.report);
  out.fallback = step.fallback;
  return out;
}

/// Dispatches on cfg.method.
template <typename Scalar>
ExtrapolationResult<Scalar> extrapolate(const ResidualMatrices<Scalar>& rm, const ExtrapolatorConfig<Scalar>& cfg) {
  switch (cfg.method) {
    case Method::RNA: return rna_coefficients(rm, cfg.lambda);
    case Method::DNA: return dna_coefficients(rm);
    case Method::DNA1: return dna1_coefficients(rm);
    case Method::DNA2: {
      const VectorX<Scalar> y = cfg.reference_point.value_or(VectorX<Scalar>(rm.X.col(rm.window_size() - 1)));
      return dna2_coefficients(rm, cfg.lambda, y, cfg.epsilon, cfg.symmetrize);
    }
    case Method::DNA3: return dna3_coefficients(rm, cfg.lambda, coefficient_reference(cfg, rm.window_size()));
    case Method::Anderson: return anderson_coefficients(rm);
  }
  throw ArgumentError("extrapolate: unknown method");
}

}  // namespace dna
