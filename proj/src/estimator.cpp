#include "rrr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rrr/errors.hpp"

namespace rrr {

namespace {

void check_grid(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw UnsortedGrid("lambda grid is empty");
  for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
    if (!(lambdas[k] < lambdas[k + 1])) {
      throw UnsortedGrid("lambda grid must be strictly increasing");
    }
  }
}

}  // namespace

int estimate_rank(const Eigen::VectorXd& d, double gamma, double lambda) {
  const double threshold = lambda > 0.0 ? std::pow(lambda, 1.0 / (gamma + 1.0)) : 0.0;
  int rank = 0;
  while (rank < d.size() && d(rank) > threshold) ++rank;
  return rank;
}

int estimate_rank(const ProjectedSpectrum& spectrum, const PenaltyConfig& cfg) {
  return estimate_rank(spectrum.singular_values, cfg.gamma, cfg.lambda);
}

RrrFit fit(const RrrDataset& data, const ProjectedSpectrum& spectrum, const PenaltyConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("fit requires lambda > 0");
  if (!(cfg.gamma >= 0.0)) throw std::invalid_argument("fit requires gamma >= 0");

  const Eigen::VectorXd& d = spectrum.singular_values;
  const Eigen::Index m = d.size();
  const int rank = estimate_rank(d, cfg.gamma, cfg.lambda);

  // Soft-thresholded singular values with adaptive weights d_i^{-gamma};
  // components at d_i = 0 carry infinite weight and are always dropped, which
  // the rank count above already encodes.
  Eigen::VectorXd kept = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < rank; ++i) {
    kept(i) = std::max(d(i) - cfg.lambda * std::pow(d(i), -cfg.gamma), 0.0);
  }

  RrrFit out;
  out.lambda = cfg.lambda;
  out.gamma = cfg.gamma;
  out.rank = rank;
  if (rank == 0) {
    out.fitted = Eigen::MatrixXd::Zero(data.n(), data.q());
    out.coefficient = Eigen::MatrixXd::Zero(data.p(), data.q());
  } else {
    const auto left = spectrum.left_vectors.leftCols(rank);
    const auto right = spectrum.right_vectors.leftCols(rank);
    const auto scale = kept.head(rank).asDiagonal();
    out.fitted = left * scale * right.transpose();
    out.coefficient = spectrum.pseudo_inverse_apply(out.fitted);
  }

  // Objective through the spectral identity: the residual splits into the
  // out-of-column-space part |Y|^2 - sum d_i^2 and the shrinkage part.
  double rss = data.y.squaredNorm() - d.squaredNorm();
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double g = i < rank ? kept(i) : 0.0;
    rss += (d(i) - g) * (d(i) - g);
    if (d(i) > 0.0 && g > 0.0) penalty += std::pow(d(i), -cfg.gamma) * g;
  }
  out.objective_value = 0.5 * rss + cfg.lambda * penalty;
  return out;
}

std::vector<int> rank_path_values(const Eigen::VectorXd& d, double gamma,
                                  const std::vector<double>& lambdas) {
  check_grid(lambdas);
  std::vector<int> ranks(lambdas.size());
  int rank = estimate_rank(d, gamma, 0.0);  // count of positive values
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double threshold =
        lambdas[k] > 0.0 ? std::pow(lambdas[k], 1.0 / (gamma + 1.0)) : 0.0;
    while (rank > 0 && !(d(rank - 1) > threshold)) --rank;
    ranks[k] = rank;
  }
  return ranks;
}

RankPath rank_path(const ProjectedSpectrum& spectrum, double gamma,
                   const std::vector<double>& lambdas, int source) {
  RankPath path;
  path.lambdas = lambdas;
  path.ranks = rank_path_values(spectrum.singular_values, gamma, lambdas);
  path.source = source;
  return path;
}

std::vector<double> default_lambda_grid(const Eigen::VectorXd& d, double gamma, int extra_points) {
  // positivity up to the numerical-zero floor of the spectrum
  const double cutoff = d.size() > 0 && d(0) > 0.0
                            ? static_cast<double>(d.size()) *
                                  std::numeric_limits<double>::epsilon() * d(0)
                            : 0.0;
  int m_pos = 0;
  while (m_pos < d.size() && d(m_pos) > cutoff) ++m_pos;
  if (m_pos == 0) throw ZeroSpectrum("no positive singular values; cannot build a lambda grid");

  const double expo = gamma + 1.0;
  std::set<double> grid;
  grid.insert(std::pow(d(m_pos - 1) / 2.0, expo));
  for (int i = 0; i + 1 < m_pos; ++i) {
    if (d(i + 1) < d(i)) grid.insert(std::pow((d(i) + d(i + 1)) / 2.0, expo));
  }
  grid.insert(std::pow(1.05 * d(0), expo));

  if (extra_points > 0) {
    const double lo = std::log(*grid.begin());
    const double hi = std::log(*grid.rbegin());
    for (int i = 1; i <= extra_points; ++i) {
      grid.insert(std::exp(lo + (hi - lo) * i / (extra_points + 1)));
    }
  }
  return {grid.begin(), grid.end()};
}

std::vector<double> default_lambda_grid(const ProjectedSpectrum& spectrum, double gamma,
                                        int extra_points) {
  return default_lambda_grid(spectrum.singular_values, gamma, extra_points);
}

}  // namespace rrr
