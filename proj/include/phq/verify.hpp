#pragma once

// Verification suites behind `phq verify`. Each check compares one measured
// number against a pinned tolerance; a report passes iff every check does.

#include <optional>
#include <string>
#include <vector>

#include "phq/invariant.hpp"

namespace phq::verify {

struct Check {
  std::string id;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";  // measured <relation> tolerance
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::string suite;
  std::vector<Check> checks;
  std::vector<std::string> errata;       // closed forms that failed their check
  std::vector<std::string> diagnostics;  // measured quantities without a pass/fail claim

  bool passed() const;
  /// Deterministic JSON, numbers at 12 significant digits.
  std::string to_json() const;
};

struct Options {
  /// Replaces the default presets where a suite uses a scenario.
  std::optional<invariant::Scenario> scenario;
  /// Parallel suites for "all"; 0 means PHQ_THREADS or hardware concurrency.
  int threads = 0;
};

const std::vector<std::string>& suite_names();  // symbolic, ode, pde, moments

/// One suite, or "all" for every suite merged with prefixed check ids.
/// Throws std::invalid_argument for an unknown suite.
VerificationReport run_suite(const std::string& suite, const Options& options = {});

/// PHQ_THREADS if set to a positive integer, else hardware concurrency (>= 1).
int default_threads();

}  // namespace phq::verify
