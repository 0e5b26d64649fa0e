#include "rrr/dataset.hpp"

#include <algorithm>
#include <numeric>

#include "rrr/errors.hpp"

namespace rrr {

void RrrDataset::validate() const {
  if (y.rows() != x.rows()) {
    throw ShapeMismatch("response and design must have the same row count, got " +
                        std::to_string(y.rows()) + " vs " + std::to_string(x.rows()));
  }
  if (y.rows() < 2) throw ShapeMismatch("need at least 2 rows");
  if (y.cols() < 1 || x.cols() < 1) throw ShapeMismatch("need at least one column in x and y");
  if (!y.allFinite() || !x.allFinite()) throw NonFiniteInput("dataset contains NaN or Inf");
}

std::vector<int> subsample_indices(int n, int b, RngStream& rng) {
  // Partial Fisher-Yates over the index array, then sort for a canonical
  // row order.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < b; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(b);
  std::sort(idx.begin(), idx.end());
  return idx;
}

RrrDataset take_rows(const RrrDataset& data, const std::vector<int>& rows) {
  RrrDataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()), data.y.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
    out.y.row(static_cast<Eigen::Index>(i)) = data.y.row(rows[i]);
  }
  return out;
}

RrrDataset subsample(const RrrDataset& data, int b, RngStream& rng) {
  const int n = static_cast<int>(data.n());
  if (b < 2 || b >= n) {
    throw BadSubsampleSize("subsample size must satisfy 2 <= b < n, got b=" + std::to_string(b) +
                           " with n=" + std::to_string(n));
  }
  return take_rows(data, subsample_indices(n, b, rng));
}

}  // namespace rrr
