#ifndef PDEARENA_ERRORS_HPP
#define PDEARENA_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace pdearena {

/// Bad arguments to a public operation (n = 0 cells, inverted box, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A query point lies outside the mesh box.
class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Factorization hit a zero pivot; `row` names the offending row.
class FactorizationBreakdown : public std::runtime_error {
 public:
  FactorizationBreakdown(const std::string& what, int row)
      : std::runtime_error(what), row(row) {}
  int row;
};

/// Iterative solver did not reach the requested tolerance. Carries the best
/// iterate so callers can inspect or reuse it.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, std::vector<double> best,
                int iterations, double residual)
      : std::runtime_error(what),
        best_iterate(std::move(best)),
        iterations(iterations),
        relative_residual(residual) {}
  std::vector<double> best_iterate;
  int iterations;
  double relative_residual;
};

}  // namespace pdearena

#endif
