#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "rrr/estimator.hpp"
#include "rrr/rng.hpp"

namespace rrr {

enum class Criterion { kAic, kBic, kGic, kBicp, kGcv, kPic };

const char* criterion_name(Criterion kind);

/// Outcome of a tuning-parameter selection: the chosen grid point, the
/// full-data rank there, the per-grid-point score trace (+inf marks skipped
/// or pathological points) and free-form diagnostics.
struct SelectionResult {
  std::string method;
  double lambda = 0.0;
  int rank = 0;
  std::vector<double> score_trace;
  std::map<std::string, std::string> diagnostics;
};

constexpr double kInfiniteScore = std::numeric_limits<double>::infinity();

/// Information-criterion value for one fit. RSS = |Y - XC_hat|_F^2 and
/// df = rank * (r_x + q - rank). GCV/PIC map nonpositive denominators to
/// +inf; the log-based criteria clamp RSS at 1e-300.
double criterion_score(Criterion kind, const RrrDataset& data, const RrrFit& fitres,
                       int design_rank);

/// Fits at every grid point, scores each fit, returns the minimizer with ties
/// broken toward larger lambda. Throws AllScoresInfinite when no grid point
/// scores finite.
SelectionResult select_by_criterion(Criterion kind, const RrrDataset& data, double gamma,
                                    const std::vector<double>& lambdas);
SelectionResult select_by_criterion(Criterion kind, const RrrDataset& data,
                                    const ProjectedSpectrum& spectrum, double gamma,
                                    const std::vector<double>& lambdas);

/// K-fold cross validation: a random permutation partitions the rows into
/// near-equal folds (the first n mod k folds get the extra row); each fold is
/// predicted from a fit on its complement and scored by the raw squared
/// prediction error; the CV score is the mean over folds. The reported rank
/// is the full-data rank at the chosen lambda.
SelectionResult kfold_cv(const RrrDataset& data, double gamma, const std::vector<double>& lambdas,
                         int k_folds, RngStream rng);

}  // namespace rrr
