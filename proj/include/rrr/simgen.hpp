#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "rrr/core.hpp"
#include "rrr/dataset.hpp"
#include "rrr/rng.hpp"

namespace rrr {

/// Synthetic-model description: Y = XC + E with a rank-r_star coefficient
/// C = (s/1000) C1 C2^T, a rank-design_rank design X = X1 X2^T Gamma^{1/2}
/// whose columns carry AR(1) correlation rho, and N(0, sigma^2) noise.
/// The s knob is calibrated in thousandths of the raw coefficient scale, so
/// values in the tens put the signal-to-noise ratio near 1-3.
struct SimulationConfig {
  int n = 0;
  int p = 0;
  int q = 0;
  int design_rank = 0;  // r_x
  int true_rank = 0;    // r_star
  double rho = 0.0;
  double s = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  void validate() const;
};

struct SimulatedDataset {
  RrrDataset data;
  Eigen::MatrixXd true_coefficient;  // p x q
  Eigen::MatrixXd noise;             // n x q
  double snr = 0.0;
  int effective_rank = 0;
};

/// Symmetric square root of the AR(1) correlation matrix Gamma_ij = rho^|i-j|
/// via eigendecomposition (SPD for rho in [0, 1)).
Eigen::MatrixXd ar1_sqrt(int p, double rho);

/// Draws one dataset. Deterministic given (seed, stream); component draws use
/// fixed forked streams so the layout is stable under config changes.
SimulatedDataset generate(const SimulationConfig& cfg);

/// d_{r_star}(XC) / d_1(PE), with P the projector onto col(X). Throws
/// DegenerateSignal when the signal's r_star-th singular value is zero.
double compute_snr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& coefficient,
                   const Eigen::MatrixXd& noise, int r_star);
double compute_snr(const SimulatedDataset& sim, int r_star);

/// Count of singular values of XC exceeding d_1(PE).
int effective_rank(const Eigen::MatrixXd& x, const Eigen::MatrixXd& coefficient,
                   const Eigen::MatrixXd& noise);
int effective_rank(const SimulatedDataset& sim);

}  // namespace rrr
