#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <nlohmann/json.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rrr/bench.hpp"
#include "rrr/csv.hpp"
#include "rrr/errors.hpp"

using namespace rrr;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_spec(std::uint64_t seed) {
  ExperimentSpec spec;
  spec.model.n = 60;
  spec.model.p = 8;
  spec.model.q = 6;
  spec.model.design_rank = 5;
  spec.model.true_rank = 2;
  spec.model.rho = 0.1;
  spec.model.s = 80.0;
  spec.model.seed = seed;
  spec.methods = {Method::kAic, Method::kGcv, Method::kStars};
  spec.replications = 8;
  spec.stars.n_subsamples = 25;
  spec.cv_folds = 3;
  spec.gamma = 2.0;
  spec.grid_extra_points = 20;
  return spec;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("csv round trip is exact and ragged rows are rejected") {
  TempDir dir("rrr_csv_test");
  RngStream rng(3);
  Eigen::MatrixXd m(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = rng.next_normal() * std::pow(10.0, (i - 2) * 3);

  const std::string path = (dir.path / "m.csv").string();
  save_matrix_csv(m, path);
  const Eigen::MatrixXd back = load_matrix_csv(path);
  CHECK(back == m);  // bitwise, via shortest round-trip formatting

  std::ofstream bad(dir.path / "bad.csv");
  bad << "1,2,3\n4,5\n";
  bad.close();
  CHECK_THROWS_AS(load_matrix_csv((dir.path / "bad.csv").string()), std::invalid_argument);

  std::ofstream alpha(dir.path / "alpha.csv");
  alpha << "1,2\n3,x\n";
  alpha.close();
  CHECK_THROWS_AS(load_matrix_csv((dir.path / "alpha.csv").string()), std::invalid_argument);
}

TEST_CASE("an easy instance is recovered perfectly") {
  ExperimentSpec spec = small_spec(42);
  spec.model.sigma = 1e-6;  // essentially noiseless
  spec.replications = 1;
  spec.methods = {Method::kAic, Method::kStars};
  const ExperimentResult result = run_experiment(spec);
  REQUIRE(result.rows.size() == 2);
  for (const auto& row : result.rows) {
    CHECK(row.recovery_pct == 100.0);
    CHECK(row.bias_mean == 0.0);
    CHECK(row.error_count == 0);
  }
}

TEST_CASE("ratio columns close to 100 and rows aggregate per method") {
  const ExperimentResult result = run_experiment(small_spec(7));
  REQUIRE(result.rows.size() == 3);
  for (const auto& row : result.rows) {
    CHECK(std::abs(row.recovery_pct + row.under_pct + row.over_pct - 100.0) <= 0.5);
    CHECK(row.snr_mean > 0.0);
  }
}

TEST_CASE("experiments are byte-deterministic") {
  TempDir dir1("rrr_bench_det1");
  TempDir dir2("rrr_bench_det2");
  ExperimentSpec spec = small_spec(11);
  spec.output_dir = dir1.path.string();
  run_experiment(spec);
  spec.output_dir = dir2.path.string();
  run_experiment(spec);

  CHECK(slurp(dir1.path / "metrics.csv") == slurp(dir2.path / "metrics.csv"));
  // audit echoes the spec including output_dir; compare after stripping it
  std::string a1 = slurp(dir1.path / "audit.json");
  std::string a2 = slurp(dir2.path / "audit.json");
  const auto strip = [](std::string s, const std::string& needle) {
    const auto pos = s.find(needle);
    if (pos != std::string::npos) s.erase(pos, s.find('\n', pos) - pos);
    return s;
  };
  CHECK(strip(a1, "\"output_dir\"") == strip(a2, "\"output_dir\""));
}

TEST_CASE("adding a method leaves other rows unchanged") {
  ExperimentSpec solo = small_spec(13);
  solo.methods = {Method::kAic};
  ExperimentSpec both = small_spec(13);
  both.methods = {Method::kAic, Method::kStars};

  const MetricsRow row_solo = run_experiment(solo).rows.at(0);
  const MetricsRow row_both = run_experiment(both).rows.at(0);
  CHECK(row_solo.recovery_pct == row_both.recovery_pct);
  CHECK(row_solo.bias_mean == row_both.bias_mean);
  CHECK(row_solo.bias_sd == row_both.bias_sd);
  CHECK(row_solo.snr_mean == row_both.snr_mean);
}

TEST_CASE("split evaluation validates the fraction and emits one row per method") {
  const SimulatedDataset sim = generate(small_spec(21).model);
  ExperimentSpec spec = small_spec(21);
  spec.replications = 4;
  spec.methods = {Method::kAic, Method::kCv, Method::kStars};
  spec.stars.n_subsamples = 20;

  CHECK_THROWS_AS(run_split_evaluation(sim.data, spec, 0.0, RngStream(1)), BadSplit);
  CHECK_THROWS_AS(run_split_evaluation(sim.data, spec, 1.0, RngStream(1)), BadSplit);
  CHECK_THROWS_AS(run_split_evaluation(sim.data, spec, 0.995, RngStream(1)), BadSplit);

  const ExperimentResult result =
      run_split_evaluation(sim.data, spec, 0.8, RngStream(5), spec.model.true_rank);
  REQUIRE(result.rows.size() == 3);
  for (const auto& row : result.rows) {
    CHECK(row.mspe_mean.has_value());
    CHECK(*row.mspe_mean > 0.0);
    CHECK(std::abs(row.recovery_pct + row.under_pct + row.over_pct - 100.0) <= 0.5);
  }
}

TEST_CASE("instability profile export round-trips") {
  TempDir dir("rrr_profile_test");
  const SimulatedDataset sim = generate(small_spec(33).model);
  StarsConfig cfg;
  cfg.n_subsamples = 20;
  cfg.gamma = 2.0;
  cfg.lambdas = default_lambda_grid(projected_singular_values(sim.data).singular_values, 2.0, 10);

  const std::string path = (dir.path / "profile.csv").string();
  export_instability_profile(sim.data, cfg, RngStream(9), path);

  const InstabilityProfile profile = build_profile(sim.data, cfg, RngStream(9));

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "lambda,log_lambda,instability,cumulative_min,full_data_rank,selected");
  std::size_t rows = 0;
  std::string line;
  int selected_total = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    REQUIRE(fields.size() == 6);
    const auto parse = [](const std::string& s) {
      double v = 0.0;
      std::from_chars(s.data(), s.data() + s.size(), v);
      return v;
    };
    CHECK(parse(fields[0]) == profile.lambdas[rows]);
    CHECK(parse(fields[2]) == profile.instability[rows]);
    CHECK(parse(fields[3]) == profile.cumulative_min[rows]);
    CHECK(static_cast<int>(parse(fields[4])) == profile.full_data_ranks[rows]);
    selected_total += static_cast<int>(parse(fields[5]));
    ++rows;
  }
  CHECK(rows == cfg.lambdas.size());  // row count = |grid| + 1 header
  CHECK(selected_total <= 1);
}

TEST_CASE("a one-value sweep reproduces the plain experiment") {
  ExperimentSpec spec = small_spec(44);
  spec.methods = {Method::kStars};
  const ExperimentResult direct = run_experiment(spec);
  const auto cells = run_sensitivity(spec, "eta", {spec.stars.eta});
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].result.rows.at(0).recovery_pct == direct.rows.at(0).recovery_pct);
  CHECK(cells[0].result.rows.at(0).bias_mean == direct.rows.at(0).bias_mean);
  CHECK(cells[0].result.audit_json == direct.audit_json);
}

TEST_CASE("sweep parameters are validated") {
  ExperimentSpec spec = small_spec(45);
  CHECK_THROWS_AS(run_sensitivity(spec, "zeta", {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(run_sensitivity(spec, "eta", {}), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
  ExperimentSpec spec = small_spec(46);
  spec.methods = {Method::kAic, Method::kBic, Method::kGic, Method::kBicp,
                  Method::kGcv, Method::kPic, Method::kCv,  Method::kStars};
  const auto j = experiment_spec_to_json(spec);
  const ExperimentSpec back = experiment_spec_from_json(j);
  CHECK(back.model.n == spec.model.n);
  CHECK(back.model.s == spec.model.s);
  CHECK(back.methods == spec.methods);
  CHECK(back.stars.eta == spec.stars.eta);
  CHECK(back.grid_extra_points == spec.grid_extra_points);

  CHECK_THROWS_AS(method_from_label("AICC"), std::invalid_argument);
}
