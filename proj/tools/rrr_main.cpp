// Command-line front end: dataset simulation, tuning-parameter selection,
// benchmark sweeps, random-split evaluation, instability profiles, and
// hyperparameter sensitivity sweeps. Matrices travel as headerless CSV; specs
// and results as JSON.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "rrr/bench.hpp"
#include "rrr/csv.hpp"
#include "rrr/errors.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string default_output_dir() {
  if (const char* env = std::getenv("RRR_OUTPUT_DIR")) return env;
  return ".";
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

rrr::RrrDataset load_dataset(const std::string& x_path, const std::string& y_path) {
  rrr::RrrDataset data;
  data.x = rrr::load_matrix_csv(x_path);
  data.y = rrr::load_matrix_csv(y_path);
  data.validate();
  return data;
}

std::vector<double> load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<double> grid;
  double v = 0.0;
  while (in >> v) grid.push_back(v);
  if (grid.empty()) throw std::invalid_argument(path + ": empty grid file");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw rrr::UnsortedGrid(path + ": grid must be strictly increasing");
    }
  }
  return grid;
}

struct SelectOptions {
  std::string x_path, y_path, method = "StARS-RRR", grid_file, out_path;
  double gamma = 2.0;
  double eta = 0.001;
  int subsamples = 100;
  int subsample_size = 0;
  int folds = 5;
  int extra_points = 50;
  std::uint64_t seed = 0;
};

int cmd_select(const SelectOptions& opt) {
  const rrr::RrrDataset data = load_dataset(opt.x_path, opt.y_path);
  const rrr::ProjectedSpectrum spectrum = rrr::projected_spectrum(data);
  const std::vector<double> grid = opt.grid_file.empty()
                                       ? rrr::default_lambda_grid(spectrum, opt.gamma, opt.extra_points)
                                       : load_grid_file(opt.grid_file);

  const rrr::Method method = rrr::method_from_label(opt.method);
  rrr::SelectionResult result;
  if (method == rrr::Method::kCv) {
    result = rrr::kfold_cv(data, opt.gamma, grid, opt.folds, rrr::RngStream(opt.seed));
  } else if (method == rrr::Method::kStars) {
    rrr::StarsConfig cfg;
    cfg.n_subsamples = opt.subsamples;
    cfg.subsample_size = opt.subsample_size;
    cfg.eta = opt.eta;
    cfg.gamma = opt.gamma;
    cfg.lambdas = grid;
    const rrr::InstabilityProfile profile =
        rrr::build_profile(data, cfg, rrr::RngStream(opt.seed));
    result = rrr::select_lambda_stars(profile, opt.eta);
  } else {
    rrr::Criterion crit;
    switch (method) {
      case rrr::Method::kAic: crit = rrr::Criterion::kAic; break;
      case rrr::Method::kBic: crit = rrr::Criterion::kBic; break;
      case rrr::Method::kGic: crit = rrr::Criterion::kGic; break;
      case rrr::Method::kBicp: crit = rrr::Criterion::kBicp; break;
      case rrr::Method::kGcv: crit = rrr::Criterion::kGcv; break;
      default: crit = rrr::Criterion::kPic; break;
    }
    result = rrr::select_by_criterion(crit, data, spectrum, opt.gamma, grid);
  }
  result.diagnostics["seed"] = std::to_string(opt.seed);

  const std::string text = rrr::selection_result_to_json(result).dump(2);
  if (opt.out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot write " + opt.out_path);
    out << text << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-rank regression rank selection and benchmarking"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config_path;
  std::string sim_out_dir = default_output_dir();
  auto* simulate = app.add_subcommand("simulate", "Generate one synthetic dataset as CSV");
  simulate->add_option("--config", sim_config_path, "SimulationConfig JSON file")->required();
  simulate->add_option("--out", sim_out_dir, "Output directory (default $RRR_OUTPUT_DIR or .)");

  // select
  SelectOptions sel;
  auto* select = app.add_subcommand("select", "Select a tuning parameter on one dataset");
  select->add_option("--x", sel.x_path, "Design matrix CSV")->required();
  select->add_option("--y", sel.y_path, "Response matrix CSV")->required();
  select->add_option("--method", sel.method,
                     "AIC|BIC|GIC|BICP|GCV|PIC|CV|StARS-RRR (default StARS-RRR)");
  select->add_option("--gamma", sel.gamma, "Adaptive-weight exponent (default 2)");
  select->add_option("--eta", sel.eta, "Instability threshold (default 0.001)");
  select->add_option("--subsamples", sel.subsamples, "Number of subsamples N (default 100)");
  select->add_option("--subsample-size", sel.subsample_size,
                     "Subsample size b (default ceil(0.7 n))");
  select->add_option("--folds", sel.folds, "CV folds (default 5)");
  select->add_option("--grid-file", sel.grid_file, "Lambda grid file, one value per line");
  select->add_option("--extra-points", sel.extra_points,
                     "Extra log-spaced grid points (default 50)");
  select->add_option("--seed", sel.seed, "RNG seed (default 0)");
  select->add_option("--out", sel.out_path, "Write the selection JSON here instead of stdout");

  // bench
  std::string bench_spec_path;
  std::string bench_out_dir;
  auto* bench = app.add_subcommand("bench", "Run a replication benchmark from a spec");
  bench->add_option("--spec", bench_spec_path, "ExperimentSpec JSON file")->required();
  bench->add_option("--out", bench_out_dir, "Override the spec's output directory");

  // split-eval
  std::string se_x, se_y, se_methods = "AIC,BIC,GIC,BICP,GCV,PIC,CV,StARS-RRR";
  std::string se_out_dir = default_output_dir();
  double se_fraction = 0.8876;
  int se_splits = 100;
  int se_reference_rank = 0;
  double se_gamma = 2.0, se_eta = 0.001;
  int se_subsamples = 100, se_folds = 5;
  std::uint64_t se_seed = 0;
  auto* split_eval =
      app.add_subcommand("split-eval", "Random-splitting MSPE evaluation of one dataset");
  split_eval->add_option("--x", se_x, "Design matrix CSV")->required();
  split_eval->add_option("--y", se_y, "Response matrix CSV")->required();
  split_eval->add_option("--train-fraction", se_fraction, "Training fraction (default 0.8876)");
  split_eval->add_option("--splits", se_splits, "Number of random splits (default 100)");
  split_eval->add_option("--methods", se_methods, "Comma-separated method labels");
  split_eval->add_option("--true-rank", se_reference_rank,
                         "Reference rank for the ratio columns (default 0 = report plain ranks)");
  split_eval->add_option("--gamma", se_gamma, "Adaptive-weight exponent");
  split_eval->add_option("--eta", se_eta, "Instability threshold");
  split_eval->add_option("--subsamples", se_subsamples, "Number of subsamples N");
  split_eval->add_option("--folds", se_folds, "CV folds");
  split_eval->add_option("--seed", se_seed, "RNG seed");
  split_eval->add_option("--out", se_out_dir, "Output directory");

  // profile
  std::string pr_x, pr_y, pr_out = "profile.csv";
  double pr_gamma = 2.0, pr_eta = 0.001;
  int pr_subsamples = 100, pr_subsample_size = 0, pr_extra = 50;
  std::uint64_t pr_seed = 0;
  auto* profile = app.add_subcommand("profile", "Export the instability profile CSV");
  profile->add_option("--x", pr_x, "Design matrix CSV")->required();
  profile->add_option("--y", pr_y, "Response matrix CSV")->required();
  profile->add_option("--gamma", pr_gamma, "Adaptive-weight exponent");
  profile->add_option("--eta", pr_eta, "Instability threshold");
  profile->add_option("--subsamples", pr_subsamples, "Number of subsamples N");
  profile->add_option("--subsample-size", pr_subsample_size, "Subsample size b");
  profile->add_option("--extra-points", pr_extra, "Extra log-spaced grid points");
  profile->add_option("--seed", pr_seed, "RNG seed");
  profile->add_option("--out", pr_out, "Output CSV path");

  // sensitivity
  std::string sens_spec_path, sens_param, sens_values, sens_out_dir;
  auto* sensitivity =
      app.add_subcommand("sensitivity", "Sweep one StARS hyperparameter over a value list");
  sensitivity->add_option("--spec", sens_spec_path, "ExperimentSpec JSON file")->required();
  sensitivity->add_option("--param", sens_param, "eta|N|b")->required();
  sensitivity->add_option("--values", sens_values, "Comma-separated values")->required();
  sensitivity->add_option("--out", sens_out_dir, "Override the spec's output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      const rrr::SimulationConfig cfg = rrr::simulation_config_from_json(load_json(sim_config_path));
      const rrr::SimulatedDataset sim = rrr::generate(cfg);
      fs::create_directories(sim_out_dir);
      const fs::path dir(sim_out_dir);
      rrr::save_matrix_csv(sim.data.x, (dir / "x.csv").string());
      rrr::save_matrix_csv(sim.data.y, (dir / "y.csv").string());
      rrr::save_matrix_csv(sim.true_coefficient, (dir / "c.csv").string());
      ordered_json meta;
      meta["config"] = rrr::simulation_config_to_json(cfg);
      meta["snr"] = sim.snr;
      meta["effective_rank"] = sim.effective_rank;
      std::ofstream meta_out(dir / "meta.json");
      meta_out << meta.dump(2) << '\n';
      std::cout << "wrote x.csv, y.csv, c.csv, meta.json under " << sim_out_dir << '\n';
      return 0;
    }
    if (select->parsed()) return cmd_select(sel);
    if (bench->parsed()) {
      rrr::ExperimentSpec spec = rrr::experiment_spec_from_json(load_json(bench_spec_path));
      if (!bench_out_dir.empty()) spec.output_dir = bench_out_dir;
      if (spec.output_dir.empty()) spec.output_dir = default_output_dir();
      const rrr::ExperimentResult result = rrr::run_experiment(spec);
      for (const auto& row : result.rows) {
        std::cout << row.method << ": recovery " << row.recovery_pct << "% under " << row.under_pct
                  << "% over " << row.over_pct << "% bias " << row.bias_mean << '\n';
      }
      std::cout << "wrote metrics.csv, audit.json under " << spec.output_dir << '\n';
      return 0;
    }
    if (split_eval->parsed()) {
      const rrr::RrrDataset data = load_dataset(se_x, se_y);
      rrr::ExperimentSpec spec;
      spec.model = {};  // unused by split evaluation
      spec.replications = se_splits;
      spec.cv_folds = se_folds;
      spec.gamma = se_gamma;
      spec.stars.eta = se_eta;
      spec.stars.n_subsamples = se_subsamples;
      std::size_t start = 0;
      while (start <= se_methods.size()) {
        const std::size_t comma = se_methods.find(',', start);
        const std::string label =
            se_methods.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!label.empty()) spec.methods.push_back(rrr::method_from_label(label));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      spec.output_dir = se_out_dir;
      const rrr::ExperimentResult result = rrr::run_split_evaluation(
          data, spec, se_fraction, rrr::RngStream(se_seed), se_reference_rank);
      for (const auto& row : result.rows) {
        std::cout << row.method << ": rank bias " << row.bias_mean << " mspe "
                  << (row.mspe_mean ? rrr::format_double(*row.mspe_mean) : "n/a") << '\n';
      }
      std::cout << "wrote metrics.csv, audit.json under " << spec.output_dir << '\n';
      return 0;
    }
    if (profile->parsed()) {
      const rrr::RrrDataset data = load_dataset(pr_x, pr_y);
      rrr::StarsConfig cfg;
      cfg.n_subsamples = pr_subsamples;
      cfg.subsample_size = pr_subsample_size;
      cfg.eta = pr_eta;
      cfg.gamma = pr_gamma;
      const rrr::ProjectedValues pv = rrr::projected_singular_values(data);
      cfg.lambdas = rrr::default_lambda_grid(pv.singular_values, pr_gamma, pr_extra);
      rrr::export_instability_profile(data, cfg, rrr::RngStream(pr_seed), pr_out);
      std::cout << "wrote " << pr_out << '\n';
      return 0;
    }
    if (sensitivity->parsed()) {
      rrr::ExperimentSpec spec = rrr::experiment_spec_from_json(load_json(sens_spec_path));
      if (!sens_out_dir.empty()) spec.output_dir = sens_out_dir;
      if (spec.output_dir.empty()) spec.output_dir = default_output_dir();
      std::vector<double> values;
      std::size_t start = 0;
      while (start <= sens_values.size()) {
        const std::size_t comma = sens_values.find(',', start);
        const std::string field =
            sens_values.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!field.empty()) values.push_back(std::stod(field));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      const auto cells = rrr::run_sensitivity(spec, sens_param, values);
      for (const auto& cell : cells) {
        for (const auto& row : cell.result.rows) {
          std::cout << sens_param << "=" << cell.value << " " << row.method << ": recovery "
                    << row.recovery_pct << "%\n";
        }
      }
      std::cout << "wrote sensitivity tables under " << spec.output_dir << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rrr::NoStableLambda& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
