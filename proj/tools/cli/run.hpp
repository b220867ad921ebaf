#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qhp/experiments.hpp"

namespace qhp::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kSolverFailure = 2, kSelftestFailure = 3 };

enum class Format { csv, json };

struct RunConfig {
  std::string subcommand;
  std::string params_path;             // empty: none
  std::vector<std::string> overrides;  // key=value
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;                     // 0 = auto
  std::string output = "-";            // "-" = the `out` stream
  Format format = Format::csv;
};

inline constexpr int kSchemaVersion = 1;

// Entry point shared by the executable and the tests. args excludes the
// program name. Data goes to the output file or `out`; diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Invariant checks behind `selftest`; one line per check on `report`.
bool run_selftest(std::ostream& report, std::uint64_t seed, int threads);

}  // namespace qhp::cli
