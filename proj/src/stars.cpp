#include "rrr/stars.hpp"

#include <algorithm>
#include <cmath>

#include "rrr/csv.hpp"
#include "rrr/errors.hpp"
#include "rrr/estimator.hpp"
#include "rrr/parallel.hpp"

namespace rrr {

double compute_instability(const std::vector<int>& ranks_at_lambda) {
  const std::size_t n = ranks_at_lambda.size();
  if (n < 2) throw TooFewSubsamples("instability needs at least 2 subsamples");
  // Two-pass sample variance, divisor N-1.
  double mean = 0.0;
  for (int r : ranks_at_lambda) mean += r;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (int r : ranks_at_lambda) {
    const double dev = r - mean;
    ss += dev * dev;
  }
  return ss / static_cast<double>(n - 1);
}

InstabilityProfile build_profile(const RrrDataset& data, const StarsConfig& cfg, RngStream rng,
                                 int n_threads) {
  data.validate();
  if (cfg.n_subsamples < 2) throw TooFewSubsamples("need at least 2 subsamples");
  if (cfg.lambdas.empty()) throw UnsortedGrid("lambda grid is empty");
  const int n = static_cast<int>(data.n());
  const int b = cfg.subsample_size > 0
                    ? cfg.subsample_size
                    : static_cast<int>(std::ceil(0.7 * static_cast<double>(n)));
  if (b < 2 || b >= n) {
    throw BadSubsampleSize("subsample size must satisfy 2 <= b < n, got b=" + std::to_string(b));
  }

  const std::size_t grid_size = cfg.lambdas.size();
  InstabilityProfile profile;
  profile.lambdas = cfg.lambdas;

  // Index sets are drawn sequentially up front; the fits below are then
  // schedule-independent.
  std::vector<std::vector<int>> index_sets(cfg.n_subsamples);
  for (int i = 0; i < cfg.n_subsamples; ++i) {
    RngStream draw = rng.fork(static_cast<std::uint64_t>(i));
    index_sets[i] = subsample_indices(n, b, draw);
  }

  profile.subsample_ranks.resize(cfg.n_subsamples, static_cast<Eigen::Index>(grid_size));
  parallel_for(
      cfg.n_subsamples,
      [&](int i) {
        const RrrDataset sub = take_rows(data, index_sets[i]);
        const ProjectedValues pv = projected_singular_values(sub);
        const std::vector<int> ranks = rank_path_values(pv.singular_values, cfg.gamma, cfg.lambdas);
        for (std::size_t k = 0; k < grid_size; ++k) {
          profile.subsample_ranks(i, static_cast<Eigen::Index>(k)) = ranks[k];
        }
      },
      n_threads);

  profile.instability.resize(grid_size);
  profile.cumulative_min.resize(grid_size);
  std::vector<int> column(cfg.n_subsamples);
  for (std::size_t k = 0; k < grid_size; ++k) {
    for (int i = 0; i < cfg.n_subsamples; ++i) {
      column[i] = profile.subsample_ranks(i, static_cast<Eigen::Index>(k));
    }
    profile.instability[k] = compute_instability(column);
    profile.cumulative_min[k] =
        k == 0 ? profile.instability[0] : std::min(profile.cumulative_min[k - 1], profile.instability[k]);
  }

  const ProjectedValues full = projected_singular_values(data);
  profile.full_data_ranks = rank_path_values(full.singular_values, cfg.gamma, cfg.lambdas);
  profile.rank_ceiling =
      static_cast<int>(std::min<Eigen::Index>(full.design_rank, data.q()));
  return profile;
}

SelectionResult select_lambda_stars(const InstabilityProfile& profile, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  const std::size_t grid_size = profile.lambdas.size();
  if (grid_size == 0 || profile.instability.size() != grid_size ||
      profile.full_data_ranks.size() != grid_size) {
    throw std::invalid_argument("malformed instability profile");
  }

  SelectionResult result;
  result.method = "StARS-RRR";
  result.score_trace.assign(grid_size, kInfiniteScore);

  // Ascending scan of the running-minimum instability over candidate points.
  // Points whose full-data rank sits at the structural ceiling min(r_x, q)
  // are not candidates: the estimator is unpenalized there and the zero
  // variance across subsamples reflects the rank cap, not stability.
  double running_min = kInfiniteScore;
  std::size_t selected = grid_size;
  std::size_t fallback = grid_size;
  int skipped = 0;
  for (std::size_t k = 0; k < grid_size; ++k) {
    if (profile.full_data_ranks[k] >= profile.rank_ceiling) {
      ++skipped;
      continue;
    }
    running_min = std::min(running_min, profile.instability[k]);
    result.score_trace[k] = running_min;
    if (fallback == grid_size || profile.instability[k] < profile.instability[fallback]) {
      fallback = k;
    }
    if (selected == grid_size && running_min <= eta) selected = k;
  }

  if (selected == grid_size) {
    if (fallback == grid_size) {
      throw NoStableLambda("no candidate grid point (grid saturated at the rank ceiling)", 0.0, -1,
                           -1, kInfiniteScore);
    }
    throw NoStableLambda(
        "no grid point reached instability threshold eta=" + format_double(eta) +
            "; least-instability fallback at lambda=" + format_double(profile.lambdas[fallback]),
        profile.lambdas[fallback], static_cast<int>(fallback), profile.full_data_ranks[fallback],
        profile.instability[fallback]);
  }

  result.lambda = profile.lambdas[selected];
  result.rank = profile.full_data_ranks[selected];
  result.diagnostics["eta"] = format_double(eta);
  result.diagnostics["selected_index"] = std::to_string(selected);
  result.diagnostics["instability_at_selected"] = format_double(profile.instability[selected]);
  result.diagnostics["saturated_points_skipped"] = std::to_string(skipped);
  return result;
}

}  // namespace rrr
