#include "rrr/simgen.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "rrr/errors.hpp"

namespace rrr {

namespace {

// The s knob is calibrated so values in the tens land at SNR 1-3.
constexpr double kSignalUnit = 1e-3;

Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

}  // namespace

void SimulationConfig::validate() const {
  if (n < 2 || p < 1 || q < 1) throw std::invalid_argument("need n >= 2, p >= 1, q >= 1");
  if (design_rank < 1 || design_rank > std::min(n, p)) {
    throw std::invalid_argument("design rank must lie in [1, min(n, p)]");
  }
  if (true_rank < 1 || true_rank > std::min(design_rank, q)) {
    throw std::invalid_argument("true rank must lie in [1, min(r_x, q)]");
  }
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  if (!(s > 0.0)) throw std::invalid_argument("signal scale s must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("noise scale sigma must be positive");
}

Eigen::MatrixXd ar1_sqrt(int p, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  if (rho == 0.0) return Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd gamma(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) gamma(i, j) = std::pow(rho, std::abs(i - j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma);
  const Eigen::VectorXd sqrt_vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * sqrt_vals.asDiagonal() * eig.eigenvectors().transpose();
}

SimulatedDataset generate(const SimulationConfig& cfg) {
  cfg.validate();
  RngStream root(cfg.seed, cfg.stream);
  // Fixed component streams keep the layout stable however the draws are
  // consumed downstream.
  RngStream rng_c1 = root.fork(0);
  RngStream rng_c2 = root.fork(1);
  RngStream rng_x1 = root.fork(2);
  RngStream rng_x2 = root.fork(3);
  RngStream rng_e = root.fork(4);

  const Eigen::MatrixXd c1 = standard_normal(cfg.p, cfg.true_rank, rng_c1);
  const Eigen::MatrixXd c2 = standard_normal(cfg.q, cfg.true_rank, rng_c2);
  const Eigen::MatrixXd x1 = standard_normal(cfg.n, cfg.design_rank, rng_x1);
  const Eigen::MatrixXd x2 = standard_normal(cfg.p, cfg.design_rank, rng_x2);

  SimulatedDataset sim;
  sim.true_coefficient = (cfg.s * kSignalUnit) * (c1 * c2.transpose());
  Eigen::MatrixXd x0 = x1 * x2.transpose();
  sim.data.x = cfg.rho == 0.0 ? std::move(x0) : Eigen::MatrixXd(x0 * ar1_sqrt(cfg.p, cfg.rho));
  sim.noise = cfg.sigma * standard_normal(cfg.n, cfg.q, rng_e);
  sim.data.y = sim.data.x * sim.true_coefficient + sim.noise;
  sim.snr = compute_snr(sim.data.x, sim.true_coefficient, sim.noise, cfg.true_rank);
  sim.effective_rank = effective_rank(sim.data.x, sim.true_coefficient, sim.noise);
  return sim;
}

namespace {

// Singular values of the signal XC and the top singular value of the
// projected noise PE, sharing one basis factorization of X.
struct SignalNoise {
  Eigen::VectorXd signal_values;
  double noise_top = 0.0;
};

SignalNoise signal_noise_values(const Eigen::MatrixXd& x, const Eigen::MatrixXd& coefficient,
                                const Eigen::MatrixXd& noise) {
  SignalNoise out;
  Eigen::BDCSVD<Eigen::MatrixXd> signal_svd(x * coefficient);
  out.signal_values = signal_svd.singularValues();

  Eigen::BDCSVD<Eigen::MatrixXd> xsvd(x, Eigen::ComputeThinU);
  const Eigen::VectorXd& xvals = xsvd.singularValues();
  const double cutoff = static_cast<double>(std::max(x.rows(), x.cols())) *
                        std::numeric_limits<double>::epsilon() * xvals(0);
  int r_x = 0;
  while (r_x < xvals.size() && xvals(r_x) > cutoff) ++r_x;
  const Eigen::MatrixXd projected = xsvd.matrixU().leftCols(r_x).transpose() * noise;
  Eigen::BDCSVD<Eigen::MatrixXd> noise_svd(projected);
  out.noise_top = noise_svd.singularValues()(0);
  return out;
}

}  // namespace

double compute_snr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& coefficient,
                   const Eigen::MatrixXd& noise, int r_star) {
  const SignalNoise sn = signal_noise_values(x, coefficient, noise);
  if (r_star < 1 || r_star > sn.signal_values.size() || !(sn.signal_values(r_star - 1) > 0.0)) {
    throw DegenerateSignal("signal singular value d_{r*}(XC) is zero");
  }
  return sn.signal_values(r_star - 1) / sn.noise_top;
}

double compute_snr(const SimulatedDataset& sim, int r_star) {
  return compute_snr(sim.data.x, sim.true_coefficient, sim.noise, r_star);
}

int effective_rank(const Eigen::MatrixXd& x, const Eigen::MatrixXd& coefficient,
                   const Eigen::MatrixXd& noise) {
  const SignalNoise sn = signal_noise_values(x, coefficient, noise);
  // numerically-zero signal values must not be counted when the projected
  // noise is (near) zero
  const double zero_cutoff = sn.signal_values.size() > 0
                                 ? static_cast<double>(std::max(x.rows(), x.cols())) *
                                       std::numeric_limits<double>::epsilon() * sn.signal_values(0)
                                 : 0.0;
  const double threshold = std::max(sn.noise_top, zero_cutoff);
  int count = 0;
  for (Eigen::Index i = 0; i < sn.signal_values.size(); ++i) {
    if (sn.signal_values(i) > threshold) ++count;
  }
  return count;
}

int effective_rank(const SimulatedDataset& sim) {
  return effective_rank(sim.data.x, sim.true_coefficient, sim.noise);
}

}  // namespace rrr
