#pragma once

#include <Eigen/Core>

#include "rrr/dataset.hpp"

namespace rrr {

/// Rank-constrained ridge-generalized reduced-rank fit, trained on centered
/// data with a means-based intercept.
struct RefitModel {
  Eigen::MatrixXd coefficient;  // p x q, rank <= k
  Eigen::VectorXd intercept;    // q
  int rank = 0;
  double ridge = 0.0;
};

/// Scale-aware default ridge parameter, 1e-3 * d_1(Xc^T Xc) / n.
double default_ridge(const RrrDataset& train);

/// Classical reduced-rank regression on ridge covariance estimates
/// Sigma_xx = (Xc^T Xc + t I)/n, restricted to the top-k eigenvectors of
/// Sigma_yx Sigma_xx^{-1} Sigma_xy (identity response weighting). k = 0 gives
/// the zero coefficient, i.e. mean-only predictions. Throws
/// SingularCovariance only when t = 0 and Xc^T Xc is numerically singular.
RefitModel refit_ridge_rrr(const RrrDataset& train, int k, double t);

Eigen::MatrixXd predict(const RefitModel& model, const Eigen::MatrixXd& x);

/// 100 * |Y_test - predictions|_F^2 / (q * n_test).
double mspe(const RefitModel& model, const RrrDataset& test);

}  // namespace rrr
