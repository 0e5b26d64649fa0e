#pragma once

#include <Eigen/Core>
#include <vector>

#include "rrr/rng.hpp"

namespace rrr {

/// A multivariate regression dataset: response y (n x q) paired row-wise with
/// the design x (n x p). Immutable by convention after construction; safe to
/// share across threads.
struct RrrDataset {
  Eigen::MatrixXd y;  // n x q
  Eigen::MatrixXd x;  // n x p

  Eigen::Index n() const { return y.rows(); }
  Eigen::Index q() const { return y.cols(); }
  Eigen::Index p() const { return x.cols(); }

  /// Throws ShapeMismatch / NonFiniteInput when the invariants
  /// (matching row counts, n >= 2, p,q >= 1, finite entries) fail.
  void validate() const;
};

/// b distinct row indices drawn uniformly without replacement from [0, n),
/// returned sorted. Deterministic given the stream.
std::vector<int> subsample_indices(int n, int b, RngStream& rng);

/// Row subsample of (x, y) with pairing preserved. Throws BadSubsampleSize
/// unless 2 <= b < n.
RrrDataset subsample(const RrrDataset& data, int b, RngStream& rng);

/// Dataset restricted to the given rows (no validation of the index set).
RrrDataset take_rows(const RrrDataset& data, const std::vector<int>& rows);

}  // namespace rrr
