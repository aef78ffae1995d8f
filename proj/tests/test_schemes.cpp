#include <gtest/gtest.h>

#include "dna/errors.hpp"
#include "dna/linalg.hpp"
#include "dna/schemes.hpp"
#include "test_util.hpp"

namespace dna {
namespace {

using test::gaussian_vector;

LeastSquaresProblem synthetic_ls(Index m, Index n, double kappa, std::uint64_t seed) {
  SyntheticSpec<double> spec{m, n, geometric_singular_values<double>(std::min(m, n), kappa), seed};
  return LeastSquaresProblem(make_conditioned_matrix(spec), gaussian_vector(m, seed + 1000));
}

// Always reports a degenerate solve.
Extrapolator forced_fallback() {
  return [](const ResidualMatrices<double>& rm) {
    ExtrapolationResult<double> r;
    r.coefficients = Vector::Unit(rm.window_size(), rm.window_size() - 1);
    r.point = rm.X.col(rm.window_size() - 1);
    r.fallback = true;
    return r;
  };
}

std::vector<double> gd_values(const ConvergenceTrace& t) {
  std::vector<double> out;
  for (const auto& e : t.events)
    if (e.kind == EventKind::GD) out.push_back(e.f_value);
  return out;
}

SchemeConfig config(Scheme s, Index k, Index budget) {
  SchemeConfig c;
  c.scheme = s;
  c.window = k;
  c.budget = budget;
  return c;
}

TEST(GdRun, CountsAndDiverges) {
  const auto p = synthetic_ls(20, 5, 10.0, 1);
  const auto xs = gd_run(p, Vector(Vector::Zero(5)), 7, 1.0 / p.lipschitz());
  EXPECT_EQ(xs.size(), 8u);
  try {
    gd_run(p, Vector(Vector::Ones(5)), 5000, 1e150);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_FALSE(e.partial_iterates().empty());
    for (const auto& x : e.partial_iterates()) EXPECT_TRUE(x.allFinite());
  }
  EXPECT_THROW(gd_run(p, Vector(Vector::Zero(5)), 3, 0.0), ArgumentError);
}

TEST(Schemes, BudgetIsExactAndCountsGradientCalls) {
  const auto p = synthetic_ls(30, 10, 100.0, 2);
  const double f_star = p.closed_form_optimum()->value;
  for (Scheme s : {Scheme::PlainGD, Scheme::Online1, Scheme::Online2, Scheme::Offline}) {
    for (Index budget : {12, 13, 14, 50}) {
      test::CountingProblem counted(p);
      ExtrapolatorConfig<double> ex;
      const auto t = run_scheme(counted, gaussian_vector(10, 3), config(s, 3, budget), ex, f_star);
      EXPECT_EQ(t.events.back().grad_evals, budget) << to_string(s) << " budget " << budget;
      EXPECT_EQ(counted.calls(), budget) << to_string(s) << " budget " << budget;
      EXPECT_FALSE(t.diverged);
    }
  }
}

TEST(Schemes, Online1ExtrapolatesEveryKSteps) {
  const auto p = synthetic_ls(30, 10, 100.0, 4);
  const Index k = 4;
  const auto t = run_online1(p, gaussian_vector(10, 5), config(Scheme::Online1, k, 18), make_extrapolator({}), 0.0);
  std::vector<Index> at;
  for (const auto& e : t.events)
    if (e.kind == EventKind::Extrapolation) at.push_back(e.grad_evals);
  EXPECT_EQ(at, (std::vector<Index>{4, 8, 12, 16}));
  // Each extrapolation directly follows the GD step with the same count.
  for (std::size_t i = 1; i < t.events.size(); ++i)
    if (t.events[i].kind == EventKind::Extrapolation) {
      EXPECT_EQ(t.events[i - 1].kind, EventKind::GD);
      EXPECT_EQ(t.events[i - 1].grad_evals, t.events[i].grad_evals);
    }
}

TEST(Schemes, ForcedFallbackReproducesPlainGd) {
  const auto p = synthetic_ls(30, 10, 100.0, 6);
  const Vector x0 = gaussian_vector(10, 7);
  const auto gd = run_plain_gd(p, x0, config(Scheme::PlainGD, 3, 40), 0.0);
  for (Scheme s : {Scheme::Online1, Scheme::Online2}) {
    const auto cfg = config(s, 3, 40);
    const auto t = s == Scheme::Online1 ? run_online1(p, x0, cfg, forced_fallback(), 0.0)
                                        : run_online2(p, x0, cfg, forced_fallback(), 0.0);
    EXPECT_EQ(gd_values(t), gd_values(gd)) << to_string(s);
    EXPECT_EQ(t.fallbacks(), t.extrapolations());
  }
}

TEST(Schemes, GuardRejectsBadExtrapolation) {
  const auto p = synthetic_ls(30, 10, 100.0, 8);
  const Vector x0 = gaussian_vector(10, 9);
  Extrapolator wild = [](const ResidualMatrices<double>& rm) {
    ExtrapolationResult<double> r;
    r.coefficients = Vector::Constant(rm.window_size(), 1e6);
    r.point = rm.X * r.coefficients;
    return r;
  };
  const auto t = run_online1(p, x0, config(Scheme::Online1, 3, 30), wild, 0.0);
  const auto gd = run_plain_gd(p, x0, config(Scheme::PlainGD, 3, 30), 0.0);
  EXPECT_EQ(gd_values(t), gd_values(gd));
  EXPECT_EQ(t.fallbacks(), 10);
}

TEST(Schemes, OfflineLeavesGdUntouched) {
  const auto p = synthetic_ls(30, 10, 100.0, 10);
  const Vector x0 = gaussian_vector(10, 11);
  const Index k = 3, budget = 25;
  const auto t = run_offline(p, x0, config(Scheme::Offline, k, budget), make_extrapolator({}), 0.0);
  const auto xs = gd_run(p, x0, budget, 1.0 / p.lipschitz());
  const auto gd = t.filtered(EventKind::GD);
  ASSERT_EQ(gd.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_TRUE((gd[i].point.array() == xs[i].array()).all()) << i;
  EXPECT_EQ(t.extrapolations(), budget - k + 1);
}

TEST(Schemes, Online1Dna1BeatsGdOnIllConditionedLeastSquares) {
  const auto p = synthetic_ls(200, 100, 1e4, 12);
  const double f_star = p.closed_form_optimum()->value;
  const Vector x0 = gaussian_vector(100, 13);
  ExtrapolatorConfig<double> ex;
  ex.method = Method::DNA1;
  ex.lambda = 1e-8;
  const auto accel = run_scheme(p, x0, config(Scheme::Online1, 3, 300), ex, f_star);
  const auto gd = run_scheme(p, x0, config(Scheme::PlainGD, 3, 300), ex, f_star);
  EXPECT_LE(accel.events.back().f_gap, gd.events.back().f_gap);
}

TEST(Schemes, Online2SmokeRun) {
  const auto p = synthetic_ls(100, 50, 1e2, 14);
  for (Method m : {Method::RNA, Method::DNA, Method::DNA1, Method::DNA2, Method::DNA3}) {
    ExtrapolatorConfig<double> ex;
    ex.method = m;
    const auto t = run_scheme(p, gaussian_vector(50, 15), config(Scheme::Online2, 3, 200), ex);
    EXPECT_EQ(t.events.back().grad_evals, 200);
    for (const auto& e : t.events) EXPECT_TRUE(std::isfinite(e.f_value));
  }
}

TEST(Schemes, DivergenceIsMarked) {
  const auto p = synthetic_ls(20, 5, 10.0, 16);
  auto cfg = config(Scheme::PlainGD, 3, 3000);
  cfg.stepsize = 1e150;
  const auto t = run_plain_gd(p, gaussian_vector(5, 17), cfg, 0.0);
  EXPECT_TRUE(t.diverged);
  EXPECT_LT(t.events.back().grad_evals, 3000);
}

TEST(Schemes, ConfigValidation) {
  const auto p = synthetic_ls(20, 5, 10.0, 18);
  EXPECT_THROW(run_plain_gd(p, Vector(Vector::Zero(5)), config(Scheme::PlainGD, 0, 10), 0.0), ArgumentError);
  EXPECT_THROW(run_plain_gd(p, Vector(Vector::Zero(5)), config(Scheme::PlainGD, 3, 3), 0.0), ArgumentError);
  for (Scheme s : {Scheme::PlainGD, Scheme::Online1, Scheme::Online2, Scheme::Offline})
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_FALSE(parse_scheme("online3"));
}

}  // namespace
}  // namespace dna
