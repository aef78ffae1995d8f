#pragma once

// Gradient descent and the three ways of feeding it through an extrapolator:
//
//   online1  k GD steps, extrapolate over that window, restart GD from the
//            extrapolated point.
//   online2  after the first window, one GD step from the latest
//            extrapolated point, slide the window by one, extrapolate again.
//   offline  GD runs untouched; every sliding window is extrapolated on the
//            side and only recorded.
//
// Budgets count gradient evaluations. The cached grad f(0) that the DNA
// family needs belongs to the problem and is not charged to the budget.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dna/extrapolate.hpp"
#include "dna/problems.hpp"
#include "dna/types.hpp"

namespace dna {

enum class Scheme { PlainGD, Online1, Online2, Offline };
enum class EventKind { GD, Extrapolation };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct SchemeConfig {
  Scheme scheme = Scheme::Online1;
  Index window = 3;  ///< k: GD steps per extrapolation window
  Index budget = 100;
  std::optional<double> stepsize;  ///< defaults to 1/L
  /// Reject extrapolated points that are non-finite or whose gap exceeds
  /// 10x the gap of the window's newest iterate.
  bool guarded_restart = true;
};

void validate(const SchemeConfig& cfg);

struct TraceEvent {
  Index grad_evals = 0;
  EventKind kind = EventKind::GD;
  Vector point;
  double f_value = 0;
  double f_gap = 0;
  bool fallback = false;
  /// Extrapolation events: index of the first base point of the window in
  /// the scheme's sequence of gradient-evaluated points. -1 otherwise.
  Index window_start = -1;
};

struct ConvergenceTrace {
  std::vector<TraceEvent> events;
  double f_star = 0;
  bool diverged = false;

  Index extrapolations() const;
  Index fallbacks() const;
  /// Events of one kind, in order.
  std::vector<TraceEvent> filtered(EventKind kind) const;
};

using Extrapolator = std::function<ExtrapolationResult<double>(const ResidualMatrices<double>&)>;

Extrapolator make_extrapolator(ExtrapolatorConfig<double> cfg);

/// x_0..x_steps of fixed-step GD; exactly `steps` gradient evaluations.
/// Throws DivergenceError with the finite prefix on a non-finite iterate.
std::vector<Vector> gd_run(const Problem& p, const Vector& x0, Index steps, double alpha);

double default_stepsize(const Problem& p, const SchemeConfig& cfg);

ConvergenceTrace run_plain_gd(const Problem& p, const Vector& x0, const SchemeConfig& cfg, double f_star);
ConvergenceTrace run_online1(const Problem& p, const Vector& x0, const SchemeConfig& cfg, const Extrapolator& ex,
                             double f_star);
ConvergenceTrace run_online2(const Problem& p, const Vector& x0, const SchemeConfig& cfg, const Extrapolator& ex,
                             double f_star);
ConvergenceTrace run_offline(const Problem& p, const Vector& x0, const SchemeConfig& cfg, const Extrapolator& ex,
                             double f_star);

/// Dispatches on cfg.scheme. f_star defaults to reference_optimum(p, 1e-12).
ConvergenceTrace run_scheme(const Problem& p, const Vector& x0, const SchemeConfig& cfg,
                            const ExtrapolatorConfig<double>& ex, std::optional<double> f_star = std::nullopt);

}  // namespace dna
