#include "dna/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "dna/extrapolate.hpp"

namespace dna::oracle {

Matrix random_spd(Index n, double kappa, std::uint64_t seed) {
  if (n < 1 || !(kappa >= 1)) throw ArgumentError("random_spd: need n >= 1 and kappa >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector lambda(n);
  for (Index i = 0; i < n; ++i) lambda(i) = std::pow(kappa, unit(rng));
  lambda(0) = kappa;
  lambda(n - 1) = 1.0;
  const Matrix Q = random_orthonormal<double>(n, n, rng);
  Matrix A = Q * lambda.asDiagonal() * Q.transpose();
  return (0.5 * (A + A.transpose())).eval();
}

std::vector<CorpusCase> make_corpus(std::size_t count, std::uint64_t seed, const CorpusOptions& opts) {
  if (opts.min_dim < 2 || opts.max_dim < opts.min_dim || opts.max_window < 1 || opts.kappas.empty())
    throw ArgumentError("make_corpus: invalid options");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> dim(opts.min_dim, opts.max_dim);
  std::uniform_int_distribution<std::size_t> pick(0, opts.kappas.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<CorpusCase> out;
  out.reserve(count);
  // Rejected draws are bounded so a bad option set cannot spin forever.
  for (std::size_t attempts = 0; out.size() < count && attempts < 100 * count + 100; ++attempts) {
    const Index n = dim(rng);
    const Index cols = std::uniform_int_distribution<Index>(1, std::min(opts.max_window, n))(rng);
    const double kappa = opts.kappas[pick(rng)];

    CorpusCase c;
    c.A = random_spd(n, kappa, rng());
    c.alpha = 1.0 / kappa;  // lambda_max of random_spd is kappa
    c.iterates.resize(n, cols + 1);
    for (Index i = 0; i < n; ++i) c.iterates(i, 0) = normal(rng);
    for (Index j = 1; j <= cols; ++j)
      c.iterates.col(j) = c.iterates.col(j - 1) - c.alpha * (c.A * c.iterates.col(j - 1));

    const Matrix X = c.X();
    const Matrix AX = c.A * X;
    c.gram_condition = std::max(condition_number(Matrix(X.transpose() * AX)), condition_number(Matrix(AX.transpose() * AX)));
    if (!(c.gram_condition <= opts.max_gram_condition)) continue;
    out.push_back(std::move(c));
  }
  if (out.size() < count) throw ArgumentError("make_corpus: options reject too many draws");
  return out;
}

namespace {

double quad_value(const Matrix& A, const Vector& x) { return 0.5 * x.dot(A * x); }

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Check {
  CheckRow row;
  std::function<double(const CorpusCase&, const QuadraticCase<double>&)> metric;
};

}  // namespace

std::vector<CheckRow> run_oracle_checks(const std::vector<CorpusCase>& corpus) {
  auto path_value = [](const CorpusCase& c, Method m) {
    IterateWindow<double> w{c.iterates, Vector::Constant(c.iterates.cols() - 1, c.alpha)};
    const auto rm = build_residuals(w, Vector(Vector::Zero(c.A.rows())));
    ExtrapolatorConfig<double> cfg;
    cfg.method = m;
    cfg.lambda = 0.0;
    return quad_value(c.A, extrapolate(rm, cfg).point);
  };

  std::vector<Check> checks;
  checks.push_back({{"f_D1 closed form vs DNA-1 path (rel)", 0, 0, 0, 1e-8},
                    [&](const CorpusCase& c, const QuadraticCase<double>& q) {
                      return rel_diff(path_value(c, Method::DNA1), closed_form_values(q).f_dna1);
                    }});
  checks.push_back({{"f_R closed form vs RNA path (rel)", 0, 0, 0, 1e-8},
                    [&](const CorpusCase& c, const QuadraticCase<double>& q) {
                      return rel_diff(path_value(c, Method::RNA), closed_form_values(q).f_rna);
                    }});
  checks.push_back({{"DNA path f / f(x0)", 0, 0, 0, 1e-10},
                    [&](const CorpusCase& c, const QuadraticCase<double>&) {
                      return path_value(c, Method::DNA) / quad_value(c.A, c.iterates.col(0));
                    }});
  checks.push_back({{"1 - f_R/f_D1", 0, 0, 0, 1e-10},
                    [](const CorpusCase&, const QuadraticCase<double>& q) { return 1.0 - ratio_and_bounds(q).ratio; }});
  checks.push_back({{"f_R/f_D1 / U_R(z) - 1", 0, 0, 0, 1e-8},
                    [](const CorpusCase&, const QuadraticCase<double>& q) {
                      const auto r = ratio_and_bounds(q);
                      return r.ratio / r.upper - 1.0;
                    }});
  checks.push_back({{"U_R(z) / kappa - 1", 0, 0, 0, 1e-8},
                    [](const CorpusCase&, const QuadraticCase<double>& q) {
                      const auto r = ratio_and_bounds(q);
                      return r.upper / r.kappa - 1.0;
                    }});
  checks.push_back({{"ratio identity vs direct ratio (rel)", 0, 0, 0, 1e-8},
                    [](const CorpusCase&, const QuadraticCase<double>& q) {
                      const auto r = ratio_and_bounds(q);
                      return rel_diff(r.ratio_identity, r.ratio);
                    }});
  checks.push_back({{"pseudo-inverse product identity (rel)", 0, 0, 0, 1e-8},
                    [](const CorpusCase&, const QuadraticCase<double>& q) {
                      const auto p = pinv_identity_check(q);
                      return p.matrix_error / p.matrix_scale;
                    }});
  checks.push_back({{"y'A^{-1/2}z vs z'z (rel)", 0, 0, 0, 1e-8},
                    [](const CorpusCase&, const QuadraticCase<double>& q) {
                      const auto p = pinv_identity_check(q);
                      return p.inner_error / p.inner_scale;
                    }});

  for (const auto& c : corpus) {
    const auto q = make_case<double>(c.A, c.X());
    for (auto& check : checks) {
      double m;
      try {
        m = check.metric(c, q);
      } catch (const std::exception&) {
        m = std::numeric_limits<double>::infinity();
      }
      ++check.row.cases;
      if (!(m <= check.row.tolerance)) ++check.row.failures;
      if (check.row.cases == 1 || !(m <= check.row.worst)) check.row.worst = m;
    }
  }

  std::vector<CheckRow> rows;
  for (auto& check : checks) rows.push_back(std::move(check.row));
  return rows;
}

}  // namespace dna::oracle
