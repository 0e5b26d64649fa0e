#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rrr/selection.hpp"
#include "rrr/simgen.hpp"
#include "rrr/stars.hpp"

namespace rrr {

enum class Method { kAic, kBic, kGic, kBicp, kGcv, kPic, kCv, kStars };

const char* method_label(Method m);
Method method_from_label(const std::string& label);

/// One benchmark experiment: a simulation model, the method roster, and the
/// shared selection settings. The lambda grid is rebuilt per replication from
/// that replication's full-data spectrum (breakpoints plus grid_extra_points
/// log-spaced points), so every method sees the identical grid.
struct ExperimentSpec {
  SimulationConfig model;
  std::vector<Method> methods;
  int replications = 100;
  StarsConfig stars;  // stars.lambdas is ignored; the shared grid is used
  int cv_folds = 5;
  double gamma = 2.0;
  int grid_extra_points = 50;
  std::string output_dir;

  void validate() const;
};

/// Aggregated per-method metrics. Ratios are percentages over the
/// replications where the method produced a rank; error_count tallies
/// per-replication method failures (e.g. no stable lambda). Bias is
/// estimated rank minus the reference rank. MSPE columns are filled only by
/// split evaluations.
struct MetricsRow {
  std::string method;
  double recovery_pct = 0.0;
  double under_pct = 0.0;
  double over_pct = 0.0;
  double bias_mean = 0.0;
  double bias_sd = 0.0;
  double snr_mean = 0.0;
  std::optional<double> mspe_mean;
  std::optional<double> mspe_sd;
  int error_count = 0;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::string audit_json;  // config echo, seeds, per-replication raw outcomes
};

/// Runs the replication sweep: generate, select per method on the shared
/// grid, aggregate. Per-replication method errors are counted, never fatal.
/// When spec.output_dir is nonempty, writes metrics.csv and audit.json there.
ExperimentResult run_experiment(const ExperimentSpec& spec, int n_threads = 0);

/// Repeated random train/test splits of one dataset: per split and method,
/// select a rank on the training set, refit with the ridge-generalized
/// reduced-rank model, and score MSPE on the test set. reference_rank anchors
/// the ratio/bias columns (0 = report plain rank statistics).
ExperimentResult run_split_evaluation(const RrrDataset& data, const ExperimentSpec& spec,
                                      double train_fraction, RngStream rng,
                                      int reference_rank = 0, int n_threads = 0);

/// Writes the instability profile as CSV with columns (lambda, log_lambda,
/// instability, cumulative_min, full_data_rank, selected); `selected` marks
/// the grid point chosen at cfg.eta, all zeros when none qualifies.
void export_instability_profile(const RrrDataset& data, const StarsConfig& cfg, RngStream rng,
                                const std::string& path);

struct SensitivityCell {
  double value = 0.0;
  ExperimentResult result;
};

/// Repeats run_experiment per swept value of one StARS hyperparameter
/// ("eta", "N", or "b"; b-values below 1 are fractions of n). Writes one
/// metrics table per value plus a combined CSV when output_dir is set.
std::vector<SensitivityCell> run_sensitivity(const ExperimentSpec& spec, const std::string& param,
                                             const std::vector<double>& values, int n_threads = 0);

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

// JSON (de)serialization for the CLI surfaces.
nlohmann::ordered_json simulation_config_to_json(const SimulationConfig& cfg);
SimulationConfig simulation_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json selection_result_to_json(const SelectionResult& result);

}  // namespace rrr
