#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dna/types.hpp"

namespace dna {

/// Bad dimensions, non-finite input, or an out-of-domain parameter.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The closed-form optimum of a problem does not exist (e.g. rank-deficient
/// least squares). Value and gradient oracles keep working.
class OptimumUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular Gram matrices where the quadratic-case identities need full rank.
class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Labels or features that violate a problem's data contract.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Vector best, double best_grad_norm)
      : std::runtime_error(what), best_(std::move(best)), best_grad_norm_(best_grad_norm) {}

  const Vector& best_iterate() const { return best_; }
  double best_gradient_norm() const { return best_grad_norm_; }

 private:
  Vector best_;
  double best_grad_norm_;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::vector<Vector> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  /// Iterates produced before the first non-finite one.
  const std::vector<Vector>& partial_iterates() const { return partial_; }

 private:
  std::vector<Vector> partial_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dna
