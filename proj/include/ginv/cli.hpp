#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ginv/report.hpp"

namespace ginv {

enum class ExitCode : int { ok = 0, mismatch = 1, config_error = 2, numerical_failure = 3 };

struct RunConfig {
  /// solve, mpass, check, gallery-audit, profile, replay, gallery.
  std::string command;
  std::string map;
  std::optional<Vec> target;
  /// zero, cerami, derived or a path to a weight JSON file; empty picks the
  /// command default (derived for check and gallery-audit, zero otherwise).
  std::string weight;
  /// 0 means the map's domain radius.
  double radius = 0.0;
  int samples = 256;
  std::uint64_t seed = 42;
  double tol_residual = 1e-10;
  /// "all" or comma-separated keys among 1,2,3,starstar,4,5,star,6.
  std::string criteria = "all";
  std::string out;
  std::vector<Vec> starts;
  /// 0 means 2 R.
  double escape_norm = 0.0;
  int max_iters = 20000;
  int band_nodes = 64;
  int band_iterations = 20000;
  int shells = 64;
  int per_shell = 16;
  /// 0 means 2 R.
  double r_max = 0.0;
  /// Report to verify (replay).
  std::string report;
  bool serial = false;
};

/// "1,0", "[1, 0]" or "2.5".
Vec parse_vector(std::string_view text);
/// Vectors separated by ';'.
std::vector<Vec> parse_vector_list(std::string_view text);
std::vector<Condition> parse_criteria(std::string_view text);

/// Effective configuration embedded in every report (the output path is not part of it).
Json config_json(const RunConfig& cfg);

/// Builds the report for a command without writing anything.
Json build_report(const RunConfig& cfg);

/// Runs a command: writes the JSON report to cfg.out (stdout when empty) plus
/// CSV tables next to it. Errors go to err; returns the process exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv with the bit-exact flag names and calls run.
int cli_main(int argc, char** argv);

}  // namespace ginv
