#pragma once

// Experiment plumbing: JSON configuration, randomized partition generation,
// suite execution over instances with CSV/JSON reports, and the exit-status
// policy for the CLI.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "velling/checks.hpp"

namespace velling {

/// Random instance source: openings drawn as normalized exponential spacings
/// (uniform on the simplex) and rejection-resampled until every opening lies
/// in [min_opening, max_opening].
struct RandomSpec {
  int count = 10;
  int min_arcs = 3;
  int max_arcs = 8;
  double min_opening = 0.05;
  double max_opening = kMaxHalfOpening;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::vector<std::string> suites{"all"};
  std::vector<std::vector<double>> openings;  // explicit instances
  std::optional<RandomSpec> random;
  SolverOptions solver;
  int workers = 1;
  std::string out_dir;  // when set, report.csv / report.json land here
  bool render = false;  // also write instance_<id>.svg under out_dir

  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json() const;
  /// Throws std::invalid_argument on out-of-range fields or unknown suites.
  void validate() const;
};

/// One (instance, check) result. instance_id is -1 for instance-free rows
/// (solver self-tests). `value` is the check's headline quantity; the full
/// quantity list is carried along for the JSON report.
struct ReportRow {
  int instance_id = -1;
  std::vector<double> openings;
  std::string check;
  double omega0 = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  double margin = 0.0;
  bool passed = false;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
  std::string error;  // nonempty when the check threw; passed is false then
  std::vector<Quantity> quantities;
};

/// Deterministic in (n_arcs, min_opening, max_opening, seed). Throws
/// std::invalid_argument on infeasible bounds and std::runtime_error when
/// 10^4 rejection tries fail.
ArcPartition random_partition(int n_arcs, double min_opening, std::uint64_t seed,
                              double max_opening = kMaxHalfOpening);

/// Expand suite names ("all" included) to the ordered list of check names.
std::vector<std::string> suite_checks(const std::vector<std::string>& suites);

/// Build the instance list, run every selected check on each instance, and
/// return rows sorted by (instance_id, check order). Writes report.csv and
/// report.json (plus SVGs when cfg.render) under cfg.out_dir when set.
/// Row values depend only on the config, not on cfg.workers.
std::vector<ReportRow> run_suite(const ExperimentConfig& cfg);

bool all_passed(const std::vector<ReportRow>& rows);

/// Fixed-schema CSV: instance_id,n_arcs,openings,check,omega0,value,
/// std_error,margin,passed,seed,runtime_s. Openings are semicolon-joined.
std::string to_csv(const std::vector<ReportRow>& rows);

std::string report_json(const ExperimentConfig& cfg, const std::vector<ReportRow>& rows);

}  // namespace velling
