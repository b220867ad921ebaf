#pragma once

#include <stdexcept>
#include <string>

namespace qhp {

// A configuration violates one of its invariants (ordering, positivity,
// label/field mismatch). Raised before any numerics run.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SolverErrc {
  degenerate_kernel,  // more than one stationary state
  no_kernel,          // generator has no (numerically) zero singular value
  not_converged,      // residual diagnostics exceed their tolerances
  empty_window,       // cooling window has non-positive width
};

const char* to_string(SolverErrc code) noexcept;

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  SolverErrc code() const noexcept { return code_; }

 private:
  SolverErrc code_;
};

}  // namespace qhp
