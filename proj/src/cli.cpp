#include "dna/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dna/errors.hpp"
#include "dna/io.hpp"
#include "dna/linalg.hpp"
#include "dna/oracle.hpp"

namespace dna {

namespace {

// Independent streams derived from the user seed.
constexpr std::uint64_t kResponseStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStartStream = 0xbf58476d1ce4e5b9ULL;

Vector gaussian(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

SyntheticShape parse_shape(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  if (parts.size() != 3) throw CLI::ValidationError("--synthetic", "expected m,n,kappa");
  SyntheticShape s;
  try {
    std::size_t used = 0;
    s.rows = std::stol(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("m");
    s.cols = std::stol(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("n");
    s.kappa = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("kappa");
  } catch (const std::exception&) {
    throw CLI::ValidationError("--synthetic", "expected m,n,kappa with integer m, n");
  }
  if (s.rows < 1 || s.cols < 1 || !(s.kappa >= 1) || !std::isfinite(s.kappa))
    throw CLI::ValidationError("--synthetic", "need m, n >= 1 and finite kappa >= 1");
  return s;
}

const std::map<std::string, ProblemKind> kProblems{
    {"ls", ProblemKind::LeastSquares}, {"ridge", ProblemKind::Ridge}, {"logistic", ProblemKind::Logistic}};

// Flags shared by `run` and `compare`.
struct RunFlags {
  std::string problem = "ls";
  std::string data;
  std::string synthetic;
  std::string method = "dna1";
  std::string scheme = "online1";
  Index window = 3;
  double lambda = 1e-8;
  Index iters = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<double> mu;
  std::optional<double> tau;

  void attach(CLI::App* app, bool with_method) {
    app->add_option("--problem", problem, "ls | ridge | logistic")->check(CLI::IsMember({"ls", "ridge", "logistic"}));
    auto* d = app->add_option("--data", data, "LIBSVM file")->check(CLI::ExistingFile);
    auto* s = app->add_option("--synthetic", synthetic, "m,n,kappa");
    d->excludes(s);
    s->excludes(d);
    if (with_method)
      app->add_option("--method", method, "gd | rna | dna | dna1 | dna2 | dna3 | anderson")
          ->check(CLI::IsMember({"gd", "rna", "dna", "dna1", "dna2", "dna3", "anderson"}));
    app->add_option("--scheme", scheme, "gd | online1 | online2 | offline")
        ->check(CLI::IsMember({"gd", "online1", "online2", "offline"}));
    app->add_option("--window", window, "GD steps per extrapolation window")->check(CLI::PositiveNumber);
    app->add_option("--lambda", lambda, "regularization")->check(CLI::NonNegativeNumber);
    app->add_option("--iters", iters, "gradient evaluation budget")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "random seed");
    app->add_option("--out", out, with_method ? "trace CSV path" : "output directory")->required();
    app->add_option("--mu", mu, "ridge regularization")->check(CLI::PositiveNumber);
    app->add_option("--tau", tau, "logistic regularization")->check(CLI::PositiveNumber);
  }

  RunConfig config(const std::string& method_name) const {
    if (data.empty() && synthetic.empty()) throw CLI::RequiredError("--data or --synthetic");
    if (iters < window + 1) throw CLI::ValidationError("--iters", "must be at least window + 1");
    RunConfig cfg;
    cfg.problem = kProblems.at(problem);
    cfg.mu = mu;
    cfg.tau = tau;
    if (!data.empty()) cfg.data_path = data;
    if (!synthetic.empty()) cfg.synthetic = parse_shape(synthetic);
    cfg.scheme.scheme = *parse_scheme(scheme);
    cfg.scheme.window = window;
    cfg.scheme.budget = iters;
    if (method_name == "gd") {
      cfg.scheme.scheme = Scheme::PlainGD;
    } else {
      cfg.extrapolator.method = *parse_method(method_name);
    }
    cfg.extrapolator.lambda = lambda;
    cfg.seed = seed;
    return cfg;
  }
};

void print_table(std::ostream& out, const std::vector<oracle::CheckRow>& rows) {
  out << "check                                      cases  fail  worst        tol\n";
  for (const auto& r : rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-42s %5zu %5zu  %-12.3e %.0e  %s\n", r.name.c_str(), r.cases, r.failures,
                  r.worst, r.tolerance, r.passed() ? "PASS" : "FAIL");
    out << line;
  }
}

}  // namespace

SyntheticData make_synthetic(const SyntheticShape& shape, ProblemKind kind, std::uint64_t seed) {
  SyntheticSpec<double> spec;
  spec.rows = shape.rows;
  spec.cols = shape.cols;
  spec.singular_values = geometric_singular_values<double>(std::min(shape.rows, shape.cols), shape.kappa);
  spec.seed = seed;
  SyntheticData d;
  d.A = make_conditioned_matrix(spec);
  d.y = gaussian(shape.rows, seed ^ kResponseStream);
  if (kind == ProblemKind::Logistic) d.y = d.y.unaryExpr([](double t) { return t >= 0 ? 1.0 : -1.0; });
  return d;
}

std::unique_ptr<Problem> make_problem(const RunConfig& cfg) {
  Matrix A;
  Vector y;
  if (cfg.data_path) {
    auto ds = read_libsvm(*cfg.data_path);
    A = std::move(ds.features);
    y = std::move(ds.labels);
  } else if (cfg.synthetic) {
    auto d = make_synthetic(*cfg.synthetic, cfg.problem, cfg.seed);
    A = std::move(d.A);
    y = std::move(d.y);
  } else {
    throw ArgumentError("RunConfig: need a data path or a synthetic shape");
  }
  switch (cfg.problem) {
    case ProblemKind::LeastSquares: return std::make_unique<LeastSquaresProblem>(std::move(A), std::move(y));
    case ProblemKind::Ridge: return std::make_unique<RidgeProblem>(std::move(A), std::move(y), cfg.mu);
    case ProblemKind::Logistic:
      return std::make_unique<LogisticProblem>(Matrix(A.transpose()), std::move(y), cfg.tau);
  }
  throw ArgumentError("RunConfig: unknown problem");
}

Vector initial_point(Index n, std::uint64_t seed) { return gaussian(n, seed ^ kStartStream); }

ConvergenceTrace execute(const RunConfig& cfg) {
  const auto p = make_problem(cfg);
  return run_scheme(*p, initial_point(p->dimension(), cfg.seed), cfg.scheme, cfg.extrapolator);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinear acceleration of gradient descent: DNA, RNA and Anderson."};
  app.name("dna");
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write a synthetic LIBSVM dataset");
  std::string gen_shape;
  std::string gen_problem = "ls";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--synthetic", gen_shape, "m,n,kappa")->required();
  gen->add_option("--problem", gen_problem, "ls | ridge | logistic")->check(CLI::IsMember({"ls", "ridge", "logistic"}));
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output LIBSVM path")->required();

  auto* run = app.add_subcommand("run", "run one method and write its trace CSV");
  RunFlags run_flags;
  run_flags.attach(run, true);

  auto* cmp = app.add_subcommand("compare", "run gd, rna, dna, dna1, dna2, dna3 and write traces + summary.json");
  RunFlags cmp_flags;
  cmp_flags.attach(cmp, false);

  auto* chk = app.add_subcommand("oracle-check", "verify the quadratic-case closed forms on a seeded corpus");
  std::size_t chk_cases = 100;
  std::uint64_t chk_seed = 1;
  chk->add_option("--cases", chk_cases, "corpus size")->check(CLI::PositiveNumber);
  chk->add_option("--seed", chk_seed, "corpus seed");

  // Flag validation, all of it before any work, so every bad flag maps to 2.
  RunConfig run_cfg;
  std::vector<std::pair<std::string, RunConfig>> cmp_cfgs;
  SyntheticShape gen_spec;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (gen->parsed()) gen_spec = parse_shape(gen_shape);
    if (run->parsed()) run_cfg = run_flags.config(run_flags.method);
    if (cmp->parsed())
      for (const char* m : {"gd", "rna", "dna", "dna1", "dna2", "dna3"}) cmp_cfgs.emplace_back(m, cmp_flags.config(m));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return 2;
  }

  try {
    if (gen->parsed()) {
      const auto kind = kProblems.at(gen_problem);
      auto d = make_synthetic(gen_spec, kind, gen_seed);
      write_libsvm(gen_out, LibsvmDataset{std::move(d.A), std::move(d.y)});
      out << "wrote " << gen_out << " (" << gen_spec.rows << " x " << gen_spec.cols << ")\n";
    } else if (run->parsed()) {
      const auto trace = execute(run_cfg);
      write_trace(run_flags.out, trace);
      const auto& last = trace.events.back();
      out << run_flags.method << ": final gap " << format_double(last.f_gap) << " after " << last.grad_evals
          << " gradient evaluations (" << trace.extrapolations() << " extrapolations, " << trace.fallbacks()
          << " fallbacks)\n";
      if (trace.diverged) err << "warning: run diverged\n";
    } else if (cmp->parsed()) {
      std::filesystem::create_directories(cmp_flags.out);
      // One problem instance and optimum shared by every method.
      const auto p = make_problem(cmp_cfgs.front().second);
      const double f_star = reference_optimum(*p).value;
      const Vector x0 = initial_point(p->dimension(), cmp_flags.seed);
      nlohmann::json summary = nlohmann::json::array();
      for (const auto& [name, cfg] : cmp_cfgs) {
        const auto trace = run_scheme(*p, x0, cfg.scheme, cfg.extrapolator, f_star);
        const auto path = (std::filesystem::path(cmp_flags.out) / (name + ".csv")).string();
        write_trace(path, trace);
        const auto& last = trace.events.back();
        summary.push_back({{"method", name},
                           {"final_gap", last.f_gap},
                           {"grad_evals", last.grad_evals},
                           {"extrapolations", trace.extrapolations()},
                           {"fallbacks", trace.fallbacks()}});
        out << name << ": final gap " << format_double(last.f_gap) << '\n';
      }
      const auto path = (std::filesystem::path(cmp_flags.out) / "summary.json").string();
      std::ofstream js(path);
      if (!js) throw std::runtime_error("cannot write " + path);
      js << summary.dump(2) << '\n';
    } else if (chk->parsed()) {
      const auto rows = oracle::run_oracle_checks(oracle::make_corpus(chk_cases, chk_seed));
      print_table(out, rows);
      for (const auto& r : rows)
        if (!r.passed()) return 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace dna
