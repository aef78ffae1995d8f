#include "dna/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <utility>

#include "dna/errors.hpp"

namespace dna {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::PlainGD: return "gd";
    case Scheme::Online1: return "online1";
    case Scheme::Online2: return "online2";
    case Scheme::Offline: return "offline";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::PlainGD, Scheme::Online1, Scheme::Online2, Scheme::Offline})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

std::string_view to_string(EventKind k) { return k == EventKind::GD ? "gd" : "extrapolation"; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  if (name == "gd") return EventKind::GD;
  if (name == "extrapolation") return EventKind::Extrapolation;
  return std::nullopt;
}

void validate(const SchemeConfig& cfg) {
  if (cfg.window < 1) throw ArgumentError("SchemeConfig: window must be >= 1");
  if (cfg.budget < cfg.window + 1) throw ArgumentError("SchemeConfig: budget must be at least window + 1");
  if (cfg.stepsize && !(*cfg.stepsize > 0)) throw ArgumentError("SchemeConfig: stepsize must be positive");
}

Index ConvergenceTrace::extrapolations() const {
  Index n = 0;
  for (const auto& e : events) n += e.kind == EventKind::Extrapolation;
  return n;
}

Index ConvergenceTrace::fallbacks() const {
  Index n = 0;
  for (const auto& e : events) n += e.fallback;
  return n;
}

std::vector<TraceEvent> ConvergenceTrace::filtered(EventKind kind) const {
  std::vector<TraceEvent> out;
  for (const auto& e : events)
    if (e.kind == kind) out.push_back(e);
  return out;
}

Extrapolator make_extrapolator(ExtrapolatorConfig<double> cfg) {
  return [cfg = std::move(cfg)](const ResidualMatrices<double>& rm) { return extrapolate(rm, cfg); };
}

std::vector<Vector> gd_run(const Problem& p, const Vector& x0, Index steps, double alpha) {
  if (!(alpha > 0)) throw ArgumentError("gd_run: stepsize must be positive");
  if (steps < 1) throw ArgumentError("gd_run: need at least one step");
  if (x0.size() != p.dimension()) throw ArgumentError("gd_run: x0 has wrong dimension");
  std::vector<Vector> iterates;
  iterates.reserve(static_cast<std::size_t>(steps) + 1);
  iterates.push_back(x0);
  for (Index k = 0; k < steps; ++k) {
    Vector next = iterates.back() - alpha * p.gradient(iterates.back());
    if (!next.allFinite())
      throw DivergenceError("gd_run: non-finite iterate at step " + std::to_string(k + 1), std::move(iterates));
    iterates.push_back(std::move(next));
  }
  return iterates;
}

double default_stepsize(const Problem& p, const SchemeConfig& cfg) {
  if (cfg.stepsize) return *cfg.stepsize;
  const double L = p.lipschitz();
  if (!(L > 0) || !std::isfinite(L)) throw ArgumentError("default_stepsize: problem has no usable Lipschitz constant");
  return 1.0 / L;
}

namespace {

class TraceRecorder {
 public:
  TraceRecorder(const Problem& p, double f_star) : p_(p) { trace_.f_star = f_star; }

  double gap(const Vector& x) const { return p_.value(x) - trace_.f_star; }

  void record(Index evals, EventKind kind, const Vector& x, bool fallback = false, Index window_start = -1) {
    TraceEvent e;
    e.grad_evals = evals;
    e.kind = kind;
    e.point = x;
    e.f_value = p_.value(x);
    e.f_gap = e.f_value - trace_.f_star;
    e.fallback = fallback;
    e.window_start = window_start;
    trace_.events.push_back(std::move(e));
  }

  void mark_diverged() { trace_.diverged = true; }
  ConvergenceTrace finish() { return std::move(trace_); }

 private:
  const Problem& p_;
  ConvergenceTrace trace_;
};

// Extrapolate and decide where the next GD segment starts. `newest` is the
// latest GD output of the window.
struct RestartChoice {
  Vector point;
  bool fallback = false;
};

RestartChoice choose_restart(const ExtrapolationResult<double>& r, const Vector& newest, const SchemeConfig& cfg,
                             const TraceRecorder& rec) {
  if (r.fallback) return {newest, true};
  if (!r.point.allFinite()) return {newest, true};
  if (cfg.guarded_restart) {
    const double candidate_gap = rec.gap(r.point);
    if (!std::isfinite(candidate_gap) || candidate_gap > 10.0 * rec.gap(newest)) return {newest, true};
  }
  return {r.point, false};
}

ResidualMatrices<double> window_residuals(const std::deque<Vector>& bases, const std::deque<Vector>& grads,
                                          const Vector& g0, double alpha) {
  const Index n = g0.size();
  const Index k = static_cast<Index>(bases.size());
  Matrix X(n, k);
  Matrix G(n, k);
  for (Index i = 0; i < k; ++i) {
    X.col(i) = bases[static_cast<std::size_t>(i)];
    G.col(i) = grads[static_cast<std::size_t>(i)];
  }
  return residuals_from_gradients<double>(std::move(X), std::move(G), g0, Vector::Constant(k, alpha));
}

IterateWindow<double> gd_window(const std::vector<Vector>& iterates, std::size_t first, Index k, double alpha) {
  IterateWindow<double> w;
  w.iterates.resize(iterates.front().size(), k + 1);
  for (Index i = 0; i <= k; ++i) w.iterates.col(i) = iterates[first + static_cast<std::size_t>(i)];
  w.stepsizes = Vector::Constant(k, alpha);
  return w;
}

}  // namespace

ConvergenceTrace run_plain_gd(const Problem& p, const Vector& x0, const SchemeConfig& cfg, double f_star) {
  validate(cfg);
  const double alpha = default_stepsize(p, cfg);
  TraceRecorder rec(p, f_star);
  Vector x = x0;
  rec.record(0, EventKind::GD, x);
  for (Index evals = 1; evals <= cfg.budget; ++evals) {
    x -= alpha * p.gradient(x);
    if (!x.allFinite()) {
      rec.mark_diverged();
      break;
    }
    rec.record(evals, EventKind::GD, x);
  }
  return rec.finish();
}

ConvergenceTrace run_online1(const Problem& p, const Vector& x0, const SchemeConfig& cfg, const Extrapolator& ex,
                             double f_star) {
  validate(cfg);
  const double alpha = default_stepsize(p, cfg);
  const Index k = cfg.window;
  TraceRecorder rec(p, f_star);

  Vector start = x0;
  Index evals = 0;
  Index cycle_base = 0;
  rec.record(0, EventKind::GD, start);
  while (evals < cfg.budget) {
    // A cycle needs k gradient evaluations; a short tail is plain GD.
    const Index steps = std::min(k, cfg.budget - evals);
    std::vector<Vector> iterates{start};
    for (Index i = 0; i < steps; ++i) {
      Vector next = iterates.back() - alpha * p.gradient(iterates.back());
      ++evals;
      if (!next.allFinite()) {
        rec.mark_diverged();
        return rec.finish();
      }
      rec.record(evals, EventKind::GD, next);
      iterates.push_back(std::move(next));
    }
    if (steps < k) break;

    // Window x_0..x_k: X holds the first k iterates, x_k only enters R~.
    const auto rm = build_residuals(gd_window(iterates, 0, k, alpha), p.grad_at_origin());
    const auto result = ex(rm);
    auto choice = choose_restart(result, iterates.back(), cfg, rec);
    rec.record(evals, EventKind::Extrapolation, choice.point, choice.fallback, cycle_base);
    cycle_base += k;
    start = std::move(choice.point);
  }
  return rec.finish();
}

ConvergenceTrace run_online2(const Problem& p, const Vector& x0, const SchemeConfig& cfg, const Extrapolator& ex,
                             double f_star) {
  validate(cfg);
  const double alpha = default_stepsize(p, cfg);
  const Index k = cfg.window;
  const Vector& g0 = p.grad_at_origin();
  TraceRecorder rec(p, f_star);

  // Every gradient evaluation happens at a base point; the window is the
  // last k base points together with their gradients.
  std::deque<Vector> bases;
  std::deque<Vector> grads;
  Index window_start = 0;
  Index evals = 0;

  auto gd_step = [&](const Vector& base) -> std::optional<Vector> {
    Vector g = p.gradient(base);
    ++evals;
    Vector next = base - alpha * g;
    if (!next.allFinite()) return std::nullopt;
    bases.push_back(base);
    grads.push_back(std::move(g));
    if (static_cast<Index>(bases.size()) > k) {
      bases.pop_front();
      grads.pop_front();
      ++window_start;
    }
    rec.record(evals, EventKind::GD, next);
    return next;
  };

  rec.record(0, EventKind::GD, x0);
  Vector current = x0;
  for (Index i = 0; i < k; ++i) {
    auto next = gd_step(current);
    if (!next) {
      rec.mark_diverged();
      return rec.finish();
    }
    current = std::move(*next);
  }

  Vector newest = current;
  while (true) {
    const auto result = ex(window_residuals(bases, grads, g0, alpha));
    auto choice = choose_restart(result, newest, cfg, rec);
    rec.record(evals, EventKind::Extrapolation, choice.point, choice.fallback, window_start);
    if (evals >= cfg.budget) break;
    auto next = gd_step(choice.point);
    if (!next) {
      rec.mark_diverged();
      break;
    }
    newest = std::move(*next);
  }
  return rec.finish();
}

ConvergenceTrace run_offline(const Problem& p, const Vector& x0, const SchemeConfig& cfg, const Extrapolator& ex,
                             double f_star) {
  validate(cfg);
  const double alpha = default_stepsize(p, cfg);
  const Index k = cfg.window;
  TraceRecorder rec(p, f_star);

  std::vector<Vector> iterates{x0};
  rec.record(0, EventKind::GD, x0);
  for (Index evals = 1; evals <= cfg.budget; ++evals) {
    Vector next = iterates.back() - alpha * p.gradient(iterates.back());
    if (!next.allFinite()) {
      rec.mark_diverged();
      break;
    }
    rec.record(evals, EventKind::GD, next);
    iterates.push_back(std::move(next));
    if (evals >= k) {
      const auto first = static_cast<std::size_t>(evals - k);
      const auto rm = build_residuals(gd_window(iterates, first, k, alpha), p.grad_at_origin());
      const auto result = ex(rm);
      rec.record(evals, EventKind::Extrapolation, result.point, result.fallback, static_cast<Index>(first));
    }
  }
  return rec.finish();
}

ConvergenceTrace run_scheme(const Problem& p, const Vector& x0, const SchemeConfig& cfg,
                            const ExtrapolatorConfig<double>& ex, std::optional<double> f_star) {
  const double fs = f_star ? *f_star : reference_optimum(p).value;
  switch (cfg.scheme) {
    case Scheme::PlainGD: return run_plain_gd(p, x0, cfg, fs);
    case Scheme::Online1: return run_online1(p, x0, cfg, make_extrapolator(ex), fs);
    case Scheme::Online2: return run_online2(p, x0, cfg, make_extrapolator(ex), fs);
    case Scheme::Offline: return run_offline(p, x0, cfg, make_extrapolator(ex), fs);
  }
  throw ArgumentError("run_scheme: unknown scheme");
}

}  // namespace dna
