#pragma once

#include <Eigen/Core>

#include "rrr/dataset.hpp"

namespace rrr {

/// Singular triplets of PY, where P is the orthogonal projector onto the
/// column space of X. P is never formed: with X = U S V^T (thin) and
/// Q = U[:, :r_x], the singular values of PY equal those of Q^T Y, the left
/// vectors are Q times the left vectors of Q^T Y, and the right vectors carry
/// over. The thin design factors double as a cached pseudo-inverse,
/// X^+ M = V S^{-1} Q^T M.
///
/// m = min(r_x, q) triplets are retained, values nonincreasing.
struct ProjectedSpectrum {
  Eigen::VectorXd singular_values;  // size m, d_1 >= ... >= d_m >= 0
  Eigen::MatrixXd left_vectors;     // n x m, orthonormal columns
  Eigen::MatrixXd right_vectors;    // q x m, orthonormal columns
  int design_rank = 0;              // r_x

  // Rank-truncated SVD factors of X.
  Eigen::MatrixXd design_left;    // n x r_x (the basis Q)
  Eigen::VectorXd design_values;  // r_x positive singular values of X
  Eigen::MatrixXd design_right;   // p x r_x

  Eigen::Index m() const { return singular_values.size(); }

  /// X^+ applied to an n x k matrix.
  Eigen::MatrixXd pseudo_inverse_apply(const Eigen::MatrixXd& rhs) const;
};

/// Values-only result for hot paths (subsample rank paths) that never need
/// vectors or the pseudo-inverse.
struct ProjectedValues {
  Eigen::VectorXd singular_values;
  int design_rank = 0;
};

/// Builds the projected spectrum. tolerance = 0 selects the default rank
/// cutoff max(n, p) * eps * d_1(X). Throws NonFiniteInput / DegenerateDesign.
ProjectedSpectrum projected_spectrum(const RrrDataset& data, double tolerance = 0.0);

/// Same spectrum, computed without singular vectors.
ProjectedValues projected_singular_values(const RrrDataset& data, double tolerance = 0.0);

}  // namespace rrr
