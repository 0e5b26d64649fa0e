#pragma once

#include <Eigen/Core>
#include <vector>

#include "rrr/dataset.hpp"
#include "rrr/selection.hpp"

namespace rrr {

/// StARS-RRR configuration. subsample_size = 0 selects the default
/// ceil(0.7 n) at profile-build time.
struct StarsConfig {
  int n_subsamples = 100;
  int subsample_size = 0;
  double eta = 0.001;
  double gamma = 2.0;
  std::vector<double> lambdas;
};

/// Rank instability over a lambda grid: per-subsample rank paths, the sample
/// variance of the ranks at each grid point, its running minimum along the
/// grid, and the full-data rank path.
struct InstabilityProfile {
  std::vector<double> lambdas;
  Eigen::MatrixXi subsample_ranks;      // N x K
  std::vector<double> instability;     // D_hat, per grid point
  std::vector<double> cumulative_min;  // D_bar, running min of D_hat
  std::vector<int> full_data_ranks;
  /// Structural rank ceiling min(r_x, q) of the full data; grid points whose
  /// full-data rank sits at the ceiling are treated as unpenalized and are
  /// skipped by the selection scan.
  int rank_ceiling = 0;
};

/// Sample variance (divisor N-1) of subsample ranks at one grid point,
/// computed by the numerically stable two-pass form. Exactly zero iff the
/// ranks are constant. Throws TooFewSubsamples when fewer than two values.
double compute_instability(const std::vector<int>& ranks_at_lambda);

/// Draws N subsamples (index sets generated sequentially up front), computes
/// each subsample's rank path over the shared grid, and assembles the
/// instability profile. Deterministic given the stream and independent of the
/// parallel schedule.
InstabilityProfile build_profile(const RrrDataset& data, const StarsConfig& cfg, RngStream rng,
                                 int n_threads = 0);

/// Ascending scan for the first grid point whose running-minimum instability
/// is at most eta, skipping ceiling-saturated points (their zero variance is
/// the deterministic rank cap, not stability). Returns the full-data rank at
/// the chosen lambda. Throws NoStableLambda (with the argmin-instability
/// point as an advisory fallback) when no candidate qualifies.
SelectionResult select_lambda_stars(const InstabilityProfile& profile, double eta);

}  // namespace rrr
