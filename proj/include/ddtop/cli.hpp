#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "ddtop/instance.hpp"
#include "ddtop/search.hpp"

namespace ddtop::cli {

enum ExitCode : int {
  kExitOptimal = 0,
  kExitTimeLimit = 2,
  kExitMalformedInstance = 3,
  kExitUnreadableFile = 4,
  kExitInvalidFlags = 5,
};

enum class Mode { Solve, Oracle, GeometryExport };

[[nodiscard]] std::string to_string(Mode mode);

/// Sampling step for exported route polylines.
inline constexpr double kPolylineStep = 0.05;

struct RunConfig {
  std::string instance_path;
  /// Unset values fall back to the instance file, then to k = 2 and rho = 1.
  std::optional<int> discretizations;
  std::optional<double> turn_radius;
  double time_limit_seconds = 3600.0;
  int workers = 8;
  double big_m = master::kDefaultBigM;
  int max_paths = pricing::kDefaultMaxPaths;
  /// Empty writes the report to standard output.
  std::string output_path;
  Mode mode = Mode::Solve;
  /// Leave wall-clock fields out of the report.
  bool omit_timing = false;

  /// Empty if valid, otherwise a one-line diagnostic.
  [[nodiscard]] std::string validate() const;
};

/// Loads the instance named by `config`, applying flag overrides.
[[nodiscard]] Instance load_configured_instance(const RunConfig& config);

/// Report document for a finished solve.
[[nodiscard]] std::string solve_report(const DiscretizedGraph& graph, const search::Solution& solution,
                                       const RunConfig& config);

/// Runs one configuration, writing the report and any diagnostics.
[[nodiscard]] int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line flags and runs.
[[nodiscard]] int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ddtop::cli
