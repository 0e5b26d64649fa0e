#include "rrr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <optional>

#include "rrr/csv.hpp"
#include "rrr/errors.hpp"
#include "rrr/parallel.hpp"
#include "rrr/refit.hpp"

namespace rrr {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr Method kAllMethods[] = {Method::kAic, Method::kBic,  Method::kGic, Method::kBicp,
                                  Method::kGcv, Method::kPic, Method::kCv,  Method::kStars};

std::optional<Criterion> method_criterion(Method m) {
  switch (m) {
    case Method::kAic: return Criterion::kAic;
    case Method::kBic: return Criterion::kBic;
    case Method::kGic: return Criterion::kGic;
    case Method::kBicp: return Criterion::kBicp;
    case Method::kGcv: return Criterion::kGcv;
    case Method::kPic: return Criterion::kPic;
    default: return std::nullopt;
  }
}

}  // namespace

const char* method_label(Method m) {
  switch (m) {
    case Method::kAic: return "AIC";
    case Method::kBic: return "BIC";
    case Method::kGic: return "GIC";
    case Method::kBicp: return "BICP";
    case Method::kGcv: return "GCV";
    case Method::kPic: return "PIC";
    case Method::kCv: return "CV";
    case Method::kStars: return "StARS-RRR";
  }
  return "?";
}

Method method_from_label(const std::string& label) {
  for (Method m : kAllMethods) {
    if (label == method_label(m)) return m;
  }
  throw std::invalid_argument("unknown method label '" + label + "'");
}

void ExperimentSpec::validate() const {
  model.validate();
  if (replications < 1) throw std::invalid_argument("need at least one replication");
  if (methods.empty()) throw std::invalid_argument("method roster is empty");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      if (methods[i] == methods[j]) {
        throw std::invalid_argument(std::string("duplicate method label ") +
                                    method_label(methods[i]));
      }
    }
  }
  if (cv_folds < 2) throw std::invalid_argument("cv_folds must be at least 2");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  if (grid_extra_points < 0) throw std::invalid_argument("grid_extra_points must be >= 0");
  if (stars.n_subsamples < 2) throw TooFewSubsamples("stars needs at least 2 subsamples");
  if (!(stars.eta > 0.0)) throw std::invalid_argument("eta must be positive");
}

namespace {

struct MethodOutcome {
  std::optional<int> rank;
  double lambda = 0.0;
  std::string error;  // empty on success
  std::optional<double> mspe_value;
};

struct ReplicationRecord {
  double snr = 0.0;
  int effective_rank = 0;
  std::size_t grid_size = 0;
  std::uint64_t stream = 0;
  std::vector<MethodOutcome> outcomes;  // parallel to spec.methods
};

MethodOutcome run_method_on(Method m, const RrrDataset& data, const ProjectedSpectrum& spectrum,
                            const std::vector<double>& grid, const ExperimentSpec& spec,
                            RngStream cv_rng, RngStream stars_rng) {
  MethodOutcome out;
  try {
    if (auto crit = method_criterion(m)) {
      const SelectionResult r = select_by_criterion(*crit, data, spectrum, spec.gamma, grid);
      out.rank = r.rank;
      out.lambda = r.lambda;
    } else if (m == Method::kCv) {
      const SelectionResult r = kfold_cv(data, spec.gamma, grid, spec.cv_folds, cv_rng);
      out.rank = r.rank;
      out.lambda = r.lambda;
    } else {
      StarsConfig cfg = spec.stars;
      cfg.gamma = spec.gamma;
      cfg.lambdas = grid;
      const InstabilityProfile profile = build_profile(data, cfg, stars_rng, /*n_threads=*/1);
      const SelectionResult r = select_lambda_stars(profile, cfg.eta);
      out.rank = r.rank;
      out.lambda = r.lambda;
    }
  } catch (const NoStableLambda&) {
    out.error = "no_stable_lambda";
  } catch (const AllScoresInfinite&) {
    out.error = "all_scores_infinite";
  }
  return out;
}

MetricsRow aggregate_method(const std::string& label, const std::vector<ReplicationRecord>& recs,
                            std::size_t method_index, int reference_rank, bool with_mspe) {
  MetricsRow row;
  row.method = label;
  std::vector<double> biases;
  std::vector<double> mspes;
  int recovered = 0, under = 0, over = 0;
  double snr_sum = 0.0;
  for (const auto& rec : recs) {
    snr_sum += rec.snr;
    const MethodOutcome& out = rec.outcomes[method_index];
    if (!out.rank.has_value()) {
      ++row.error_count;
      continue;
    }
    const int rank = *out.rank;
    if (rank == reference_rank) ++recovered;
    else if (rank < reference_rank) ++under;
    else ++over;
    biases.push_back(static_cast<double>(rank - reference_rank));
    if (with_mspe && out.mspe_value.has_value()) mspes.push_back(*out.mspe_value);
  }
  const double successes = static_cast<double>(biases.size());
  if (successes > 0) {
    row.recovery_pct = 100.0 * recovered / successes;
    row.under_pct = 100.0 * under / successes;
    row.over_pct = 100.0 * over / successes;
    row.bias_mean = std::accumulate(biases.begin(), biases.end(), 0.0) / successes;
    if (biases.size() > 1) {
      double ss = 0.0;
      for (double b : biases) ss += (b - row.bias_mean) * (b - row.bias_mean);
      row.bias_sd = std::sqrt(ss / (successes - 1.0));
    }
  }
  row.snr_mean = recs.empty() ? 0.0 : snr_sum / static_cast<double>(recs.size());
  if (!mspes.empty()) {
    const double mean = std::accumulate(mspes.begin(), mspes.end(), 0.0) /
                        static_cast<double>(mspes.size());
    row.mspe_mean = mean;
    if (mspes.size() > 1) {
      double ss = 0.0;
      for (double v : mspes) ss += (v - mean) * (v - mean);
      row.mspe_sd = std::sqrt(ss / (static_cast<double>(mspes.size()) - 1.0));
    }
  }
  return row;
}

ordered_json audit_document(const ExperimentSpec& spec, const std::vector<ReplicationRecord>& recs,
                            const char* kind) {
  ordered_json doc;
  doc["kind"] = kind;
  doc["spec"] = experiment_spec_to_json(spec);
  ordered_json reps = ordered_json::array();
  for (std::size_t r = 0; r < recs.size(); ++r) {
    ordered_json rep;
    rep["replication"] = r;
    rep["stream"] = recs[r].stream;
    if (!std::isnan(recs[r].snr)) rep["snr"] = recs[r].snr;
    rep["effective_rank"] = recs[r].effective_rank;
    rep["grid_size"] = recs[r].grid_size;
    ordered_json methods;
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const MethodOutcome& out = recs[r].outcomes[mi];
      ordered_json entry;
      if (out.rank.has_value()) {
        entry["rank"] = *out.rank;
        entry["lambda"] = out.lambda;
        if (out.mspe_value.has_value()) entry["mspe"] = *out.mspe_value;
      } else {
        entry["error"] = out.error;
      }
      methods[method_label(spec.methods[mi])] = entry;
    }
    rep["methods"] = methods;
    reps.push_back(rep);
  }
  doc["replications"] = reps;
  return doc;
}

void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result) {
  if (spec.output_dir.empty()) return;
  std::filesystem::create_directories(spec.output_dir);
  const std::filesystem::path dir(spec.output_dir);
  write_metrics_csv(result.rows, (dir / "metrics.csv").string());
  std::ofstream out(dir / "audit.json");
  if (!out) throw std::runtime_error("cannot write audit.json under " + spec.output_dir);
  out << result.audit_json << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, int n_threads) {
  spec.validate();
  const RngStream root(spec.model.seed, spec.model.stream);
  std::vector<ReplicationRecord> recs(spec.replications);

  parallel_for(
      spec.replications,
      [&](int r) {
        const RngStream rep = root.fork(static_cast<std::uint64_t>(r));
        SimulationConfig cfg = spec.model;
        cfg.seed = rep.seed();
        cfg.stream = rep.fork(0).stream_id();
        const SimulatedDataset sim = generate(cfg);
        const ProjectedSpectrum spectrum = projected_spectrum(sim.data);
        const std::vector<double> grid =
            default_lambda_grid(spectrum, spec.gamma, spec.grid_extra_points);

        ReplicationRecord rec;
        rec.snr = sim.snr;
        rec.effective_rank = sim.effective_rank;
        rec.grid_size = grid.size();
        rec.stream = cfg.stream;
        rec.outcomes.reserve(spec.methods.size());
        for (Method m : spec.methods) {
          rec.outcomes.push_back(
              run_method_on(m, sim.data, spectrum, grid, spec, rep.fork(1), rep.fork(2)));
        }
        recs[static_cast<std::size_t>(r)] = std::move(rec);
      },
      n_threads);

  ExperimentResult result;
  result.rows.reserve(spec.methods.size());
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    result.rows.push_back(aggregate_method(method_label(spec.methods[mi]), recs, mi,
                                           spec.model.true_rank, /*with_mspe=*/false));
  }
  result.audit_json = audit_document(spec, recs, "experiment").dump(2);
  write_outputs(spec, result);
  return result;
}

ExperimentResult run_split_evaluation(const RrrDataset& data, const ExperimentSpec& spec,
                                      double train_fraction, RngStream rng, int reference_rank,
                                      int n_threads) {
  data.validate();
  if (spec.methods.empty()) throw std::invalid_argument("method roster is empty");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw BadSplit("train fraction must lie in (0, 1)");
  }
  const int n = static_cast<int>(data.n());
  const int n_train = static_cast<int>(std::lround(train_fraction * n));
  const int n_test = n - n_train;
  if (n_test < 1) throw BadSplit("split leaves an empty test set");
  if (n_train < 2) throw BadSplit("split leaves fewer than 2 training rows");

  std::vector<ReplicationRecord> recs(spec.replications);
  parallel_for(
      spec.replications,
      [&](int split) {
        RngStream split_rng = rng.fork(static_cast<std::uint64_t>(split));
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = 0; i < n - 1; ++i) {
          const int j =
              i + static_cast<int>(split_rng.next_below(static_cast<std::uint64_t>(n - i)));
          std::swap(perm[i], perm[j]);
        }
        std::vector<int> train_rows(perm.begin(), perm.begin() + n_train);
        std::vector<int> test_rows(perm.begin() + n_train, perm.end());
        std::sort(train_rows.begin(), train_rows.end());
        std::sort(test_rows.begin(), test_rows.end());
        const RrrDataset train = take_rows(data, train_rows);
        const RrrDataset test = take_rows(data, test_rows);

        const ProjectedSpectrum spectrum = projected_spectrum(train);
        const std::vector<double> grid =
            default_lambda_grid(spectrum, spec.gamma, spec.grid_extra_points);
        const double ridge = default_ridge(train);

        ReplicationRecord rec;
        rec.snr = std::numeric_limits<double>::quiet_NaN();
        rec.effective_rank = 0;
        rec.grid_size = grid.size();
        rec.stream = split_rng.stream_id();
        for (Method m : spec.methods) {
          MethodOutcome out = run_method_on(m, train, spectrum, grid, spec, split_rng.fork(1),
                                            split_rng.fork(2));
          if (out.rank.has_value()) {
            const int k = std::min<int>(*out.rank, static_cast<int>(std::min(train.p(), train.q())));
            const RefitModel model = refit_ridge_rrr(train, k, ridge);
            out.mspe_value = mspe(model, test);
          }
          rec.outcomes.push_back(std::move(out));
        }
        recs[static_cast<std::size_t>(split)] = std::move(rec);
      },
      n_threads);

  ExperimentResult result;
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    MetricsRow row = aggregate_method(method_label(spec.methods[mi]), recs, mi, reference_rank,
                                      /*with_mspe=*/true);
    row.snr_mean = std::numeric_limits<double>::quiet_NaN();
    result.rows.push_back(std::move(row));
  }
  ordered_json doc = audit_document(spec, recs, "split_evaluation");
  doc["train_fraction"] = train_fraction;
  doc["reference_rank"] = reference_rank;
  result.audit_json = doc.dump(2);
  write_outputs(spec, result);
  return result;
}

void export_instability_profile(const RrrDataset& data, const StarsConfig& cfg, RngStream rng,
                                const std::string& path) {
  StarsConfig used = cfg;
  if (used.lambdas.empty()) {
    const ProjectedValues pv = projected_singular_values(data);
    used.lambdas = default_lambda_grid(pv.singular_values, used.gamma, 50);
  }
  const InstabilityProfile profile = build_profile(data, used, rng);

  std::size_t selected_index = profile.lambdas.size();
  try {
    const SelectionResult sel = select_lambda_stars(profile, used.eta);
    selected_index = static_cast<std::size_t>(std::stoul(sel.diagnostics.at("selected_index")));
  } catch (const NoStableLambda&) {
    // exported with no marker
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "lambda,log_lambda,instability,cumulative_min,full_data_rank,selected\n";
  for (std::size_t k = 0; k < profile.lambdas.size(); ++k) {
    out << format_double(profile.lambdas[k]) << ',' << format_double(std::log(profile.lambdas[k]))
        << ',' << format_double(profile.instability[k]) << ','
        << format_double(profile.cumulative_min[k]) << ',' << profile.full_data_ranks[k] << ','
        << (k == selected_index ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<SensitivityCell> run_sensitivity(const ExperimentSpec& spec, const std::string& param,
                                             const std::vector<double>& values, int n_threads) {
  if (values.empty()) throw std::invalid_argument("sensitivity sweep needs at least one value");
  if (param != "eta" && param != "N" && param != "b") {
    throw std::invalid_argument("sweep parameter must be one of eta, N, b");
  }
  std::vector<SensitivityCell> cells;
  cells.reserve(values.size());
  for (double value : values) {
    ExperimentSpec cell_spec = spec;
    cell_spec.output_dir.clear();
    if (param == "eta") {
      cell_spec.stars.eta = value;
    } else if (param == "N") {
      cell_spec.stars.n_subsamples = static_cast<int>(std::lround(value));
    } else {
      // b below 1 is a fraction of n.
      cell_spec.stars.subsample_size =
          value < 1.0 ? static_cast<int>(std::ceil(value * spec.model.n))
                      : static_cast<int>(std::lround(value));
    }
    cells.push_back({value, run_experiment(cell_spec, n_threads)});
  }

  if (!spec.output_dir.empty()) {
    std::filesystem::create_directories(spec.output_dir);
    const std::filesystem::path dir(spec.output_dir);
    std::ofstream combined(dir / ("sensitivity_" + param + ".csv"));
    combined << "param_value,method,recovery_pct,under_pct,over_pct,bias_mean,bias_sd,snr_mean,"
                "errors\n";
    for (const auto& cell : cells) {
      write_metrics_csv(cell.result.rows,
                        (dir / ("metrics_" + param + "_" + format_double(cell.value) + ".csv"))
                            .string());
      for (const MetricsRow& row : cell.result.rows) {
        combined << format_double(cell.value) << ',' << row.method << ','
                 << format_double(row.recovery_pct) << ',' << format_double(row.under_pct) << ','
                 << format_double(row.over_pct) << ',' << format_double(row.bias_mean) << ','
                 << format_double(row.bias_sd) << ',' << format_double(row.snr_mean) << ','
                 << row.error_count << '\n';
      }
    }
    if (!combined) throw std::runtime_error("write failed for combined sensitivity CSV");
  }
  return cells;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "method,recovery_pct,under_pct,over_pct,bias_mean,bias_sd,snr_mean,mspe_mean,mspe_sd,"
         "errors\n";
  for (const MetricsRow& row : rows) {
    out << row.method << ',' << format_double(row.recovery_pct) << ','
        << format_double(row.under_pct) << ',' << format_double(row.over_pct) << ','
        << format_double(row.bias_mean) << ',' << format_double(row.bias_sd) << ','
        << (std::isnan(row.snr_mean) ? "" : format_double(row.snr_mean)) << ','
        << (row.mspe_mean ? format_double(*row.mspe_mean) : "") << ','
        << (row.mspe_sd ? format_double(*row.mspe_sd) : "") << ',' << row.error_count << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

ordered_json simulation_config_to_json(const SimulationConfig& cfg) {
  ordered_json j;
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["q"] = cfg.q;
  j["r_x"] = cfg.design_rank;
  j["r_star"] = cfg.true_rank;
  j["rho"] = cfg.rho;
  j["s"] = cfg.s;
  j["sigma"] = cfg.sigma;
  j["seed"] = cfg.seed;
  j["stream"] = cfg.stream;
  return j;
}

SimulationConfig simulation_config_from_json(const json& j) {
  SimulationConfig cfg;
  try {
    cfg.n = j.at("n").get<int>();
    cfg.p = j.at("p").get<int>();
    cfg.q = j.at("q").get<int>();
    cfg.design_rank = j.at("r_x").get<int>();
    cfg.true_rank = j.at("r_star").get<int>();
    cfg.rho = j.value("rho", 0.0);
    cfg.s = j.value("s", 1.0);
    cfg.sigma = j.value("sigma", 1.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.stream = j.value("stream", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad simulation config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ordered_json experiment_spec_to_json(const ExperimentSpec& spec) {
  ordered_json j;
  j["model"] = simulation_config_to_json(spec.model);
  ordered_json methods = ordered_json::array();
  for (Method m : spec.methods) methods.push_back(method_label(m));
  j["methods"] = methods;
  j["replications"] = spec.replications;
  j["stars"] = {{"subsamples", spec.stars.n_subsamples},
                {"subsample_size", spec.stars.subsample_size},
                {"eta", spec.stars.eta}};
  j["cv_folds"] = spec.cv_folds;
  j["gamma"] = spec.gamma;
  j["grid_extra_points"] = spec.grid_extra_points;
  if (!spec.output_dir.empty()) j["output_dir"] = spec.output_dir;
  return j;
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  ExperimentSpec spec;
  try {
    spec.model = simulation_config_from_json(j.at("model"));
    for (const auto& label : j.at("methods")) {
      spec.methods.push_back(method_from_label(label.get<std::string>()));
    }
    spec.replications = j.value("replications", 100);
    if (j.contains("stars")) {
      const json& s = j.at("stars");
      spec.stars.n_subsamples = s.value("subsamples", 100);
      spec.stars.subsample_size = s.value("subsample_size", 0);
      spec.stars.eta = s.value("eta", 0.001);
    }
    spec.cv_folds = j.value("cv_folds", 5);
    spec.gamma = j.value("gamma", 2.0);
    spec.grid_extra_points = j.value("grid_extra_points", 50);
    spec.output_dir = j.value("output_dir", std::string());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ordered_json selection_result_to_json(const SelectionResult& result) {
  ordered_json j;
  j["method"] = result.method;
  j["lambda"] = result.lambda;
  j["rank"] = result.rank;
  ordered_json trace = ordered_json::array();
  for (double v : result.score_trace) {
    if (std::isfinite(v)) {
      trace.push_back(v);
    } else {
      trace.push_back("inf");
    }
  }
  j["score_trace"] = trace;
  j["diagnostics"] = result.diagnostics;
  return j;
}

}  // namespace rrr
