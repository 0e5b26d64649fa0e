#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rrr/errors.hpp"
#include "rrr/simgen.hpp"

using namespace rrr;

namespace {

SimulationConfig small_config(std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.n = 30;
  cfg.p = 8;
  cfg.q = 6;
  cfg.design_rank = 5;
  cfg.true_rank = 3;
  cfg.rho = 0.5;
  cfg.s = 40.0;
  cfg.seed = seed;
  return cfg;
}

// test-side projector for the oracle paths
Eigen::MatrixXd projector_of(const Eigen::MatrixXd& x) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  const Eigen::VectorXd& vals = svd.singularValues();
  const double cutoff = std::max(x.rows(), x.cols()) *
                        std::numeric_limits<double>::epsilon() * vals(0);
  int r = 0;
  while (r < vals.size() && vals(r) > cutoff) ++r;
  const Eigen::MatrixXd q = svd.matrixU().leftCols(r);
  return q * q.transpose();
}

}  // namespace

TEST_CASE("ar1 square root squares back to the correlation matrix") {
  for (double rho : {0.0, 0.1, 0.5, 0.9}) {
    const int p = 12;
    const Eigen::MatrixXd half = ar1_sqrt(p, rho);
    Eigen::MatrixXd gamma(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) gamma(i, j) = std::pow(rho, std::abs(i - j));
    CHECK((half * half - gamma).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK(ar1_sqrt(5, 0.0).isIdentity(0.0));
}

TEST_CASE("generation is reproducible bit for bit") {
  const SimulationConfig cfg = small_config(77);
  const SimulatedDataset a = generate(cfg);
  const SimulatedDataset b = generate(cfg);
  CHECK(a.data.x == b.data.x);
  CHECK(a.data.y == b.data.y);
  CHECK(a.true_coefficient == b.true_coefficient);
  CHECK(a.snr == b.snr);
  CHECK(a.effective_rank == b.effective_rank);

  SimulationConfig other = cfg;
  other.seed = 78;
  CHECK(generate(other).data.y != a.data.y);
}

TEST_CASE("the model identity holds exactly by construction") {
  const SimulatedDataset sim = generate(small_config(5));
  CHECK((sim.data.y - (sim.data.x * sim.true_coefficient + sim.noise)).isZero(0.0));
}

TEST_CASE("the design has numerical rank r_x") {
  const SimulatedDataset sim = generate(small_config(6));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sim.data.x);
  const Eigen::VectorXd& vals = svd.singularValues();
  const double cutoff = std::max(sim.data.x.rows(), sim.data.x.cols()) *
                        std::numeric_limits<double>::epsilon() * vals(0);
  int r = 0;
  while (r < vals.size() && vals(r) > cutoff) ++r;
  CHECK(r == 5);
}

TEST_CASE("snr is homogeneous in the signal and noise scales") {
  const SimulatedDataset sim = generate(small_config(7));
  const double base = compute_snr(sim, 3);
  CHECK(base == doctest::Approx(sim.snr));

  const double c = 2.5;
  CHECK(compute_snr(sim.data.x, sim.true_coefficient, c * sim.noise, 3) ==
        doctest::Approx(base / c).epsilon(1e-12));
  CHECK(compute_snr(sim.data.x, c * sim.true_coefficient, sim.noise, 3) ==
        doctest::Approx(base * c).epsilon(1e-12));
}

TEST_CASE("effective rank: zero noise recovers the true rank") {
  const SimulatedDataset sim = generate(small_config(8));
  const Eigen::MatrixXd no_noise = Eigen::MatrixXd::Zero(30, 6);
  CHECK(effective_rank(sim.data.x, sim.true_coefficient, no_noise) == 3);
}

TEST_CASE("effective rank equals the true rank whenever the realized snr exceeds 1") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SimulatedDataset sim = generate(small_config(100 + seed));
    CHECK(sim.effective_rank <= 3);
    if (sim.snr > 1.0) CHECK(sim.effective_rank == 3);
  }
}

TEST_CASE("effective rank matches the indicator-sum transcription") {
  SimulationConfig cfg = small_config(9);
  cfg.s = 4.0;  // weak signal so the snr dips below 1
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    cfg.seed = 200 + seed;
    const SimulatedDataset sim = generate(cfg);

    Eigen::JacobiSVD<Eigen::MatrixXd> sig(sim.data.x * sim.true_coefficient);
    Eigen::JacobiSVD<Eigen::MatrixXd> noise(projector_of(sim.data.x) * sim.noise);
    const double top = noise.singularValues()(0);
    int count = 0;
    for (Eigen::Index i = 0; i < sig.singularValues().size(); ++i) {
      if (sig.singularValues()(i) > top) ++count;
    }
    CHECK(sim.effective_rank == count);
  }
}

TEST_CASE("degenerate signals are reported") {
  const SimulatedDataset sim = generate(small_config(10));
  const Eigen::MatrixXd zero_coef = Eigen::MatrixXd::Zero(8, 6);
  CHECK_THROWS_AS(compute_snr(sim.data.x, zero_coef, sim.noise, 3), DegenerateSignal);
}

TEST_CASE("configs are validated") {
  SimulationConfig cfg = small_config(1);
  cfg.true_rank = 7;  // exceeds min(r_x, q)
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(1);
  cfg.rho = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(1);
  cfg.design_rank = 20;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(1);
  cfg.s = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
