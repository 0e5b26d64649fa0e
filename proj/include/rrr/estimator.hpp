#pragma once

#include <Eigen/Core>
#include <vector>

#include "rrr/core.hpp"

namespace rrr {

/// Penalty knobs: lambda scales the adaptive nuclear norm, gamma is the
/// adaptive-weight exponent (weights w_i = d_i(PY)^{-gamma}).
struct PenaltyConfig {
  double gamma = 2.0;
  double lambda = 0.0;
};

/// Solution of the penalized least-squares problem at one (gamma, lambda):
/// fitted = XC_hat is the singular-value soft-thresholding of PY with
/// per-component thresholds lambda * d_i^{-gamma}.
struct RrrFit {
  Eigen::MatrixXd coefficient;  // p x q
  Eigen::MatrixXd fitted;       // n x q
  int rank = 0;
  double lambda = 0.0;
  double gamma = 0.0;
  double objective_value = 0.0;
};

/// Estimated rank along an increasing lambda grid; piecewise constant and
/// nonincreasing.
struct RankPath {
  std::vector<double> lambdas;
  std::vector<int> ranks;
  /// kFullData, or the subsample index the path was computed from.
  int source = kFullData;
  static constexpr int kFullData = -1;
};

/// Closed-form rank of the penalized fit: the count of singular values
/// strictly above lambda^{1/(gamma+1)}. lambda = 0 counts the positive values.
int estimate_rank(const Eigen::VectorXd& singular_values, double gamma, double lambda);
int estimate_rank(const ProjectedSpectrum& spectrum, const PenaltyConfig& cfg);

/// Fits at lambda > 0. All-thresholded spectra yield the zero fit with rank 0
/// rather than an error.
RrrFit fit(const RrrDataset& data, const ProjectedSpectrum& spectrum, const PenaltyConfig& cfg);

/// Ranks for every grid point in one pass over the sorted spectrum.
/// Throws UnsortedGrid unless lambdas is strictly increasing and nonempty.
std::vector<int> rank_path_values(const Eigen::VectorXd& singular_values, double gamma,
                                  const std::vector<double>& lambdas);
RankPath rank_path(const ProjectedSpectrum& spectrum, double gamma,
                   const std::vector<double>& lambdas, int source = RankPath::kFullData);

/// Breakpoint grid: midpoints between consecutive distinct positive singular
/// values (raised to gamma+1), a sub-minimum point (d_m/2)^{gamma+1} and a
/// super-maximum point (1.05 d_1)^{gamma+1}. Every achievable rank in [0, m]
/// occurs along the grid. extra_points > 0 interleaves log-spaced points.
/// Throws ZeroSpectrum when no singular value is positive.
std::vector<double> default_lambda_grid(const Eigen::VectorXd& singular_values, double gamma,
                                        int extra_points = 0);
std::vector<double> default_lambda_grid(const ProjectedSpectrum& spectrum, double gamma,
                                        int extra_points = 0);

}  // namespace rrr
