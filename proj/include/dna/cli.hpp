#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dna/extrapolate.hpp"
#include "dna/problems.hpp"
#include "dna/schemes.hpp"

namespace dna {

enum class ProblemKind { LeastSquares, Ridge, Logistic };

struct SyntheticShape {
  Index rows = 0;
  Index cols = 0;
  double kappa = 1;
};

struct RunConfig {
  ProblemKind problem = ProblemKind::LeastSquares;
  std::optional<double> mu;   ///< ridge; defaults to 1/n
  std::optional<double> tau;  ///< logistic; defaults to 1/(2m)
  std::optional<std::string> data_path;
  std::optional<SyntheticShape> synthetic;
  SchemeConfig scheme;
  ExtrapolatorConfig<double> extrapolator;
  std::uint64_t seed = 0;
};

/// Synthetic design: m x n with geometric singular values from kappa down
/// to 1, plus a seeded Gaussian response (sign of it for logistic labels).
struct SyntheticData {
  Matrix A;  ///< rows are samples
  Vector y;
};
SyntheticData make_synthetic(const SyntheticShape& shape, ProblemKind kind, std::uint64_t seed);

std::unique_ptr<Problem> make_problem(const RunConfig& cfg);

/// Seeded standard Gaussian starting point.
Vector initial_point(Index n, std::uint64_t seed);

ConvergenceTrace execute(const RunConfig& cfg);

/// Entry point of the `dna` tool. Returns 0 on success, 1 on runtime
/// failure and 2 on bad flags (usage goes to err).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace dna
