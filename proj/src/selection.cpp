#include "rrr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rrr/csv.hpp"
#include "rrr/errors.hpp"

namespace rrr {

const char* criterion_name(Criterion kind) {
  switch (kind) {
    case Criterion::kAic: return "AIC";
    case Criterion::kBic: return "BIC";
    case Criterion::kGic: return "GIC";
    case Criterion::kBicp: return "BICP";
    case Criterion::kGcv: return "GCV";
    case Criterion::kPic: return "PIC";
  }
  return "?";
}

double criterion_score(Criterion kind, const RrrDataset& data, const RrrFit& fitres,
                       int design_rank) {
  const double nq = static_cast<double>(data.n()) * static_cast<double>(data.q());
  const double rss = (data.y - fitres.fitted).squaredNorm();
  const double r = fitres.rank;
  const double df = r * (design_rank + static_cast<double>(data.q()) - r);
  // Guards: RSS = 0 only arises in interpolating fits; keep log scores finite
  // and ordered.
  const double log_rss = std::log(std::max(rss, 1e-300) / nq);
  switch (kind) {
    case Criterion::kAic:
      return nq * log_rss + 2.0 * df;
    case Criterion::kBic:
      return nq * log_rss + std::log(nq) * df;
    case Criterion::kGic:
      return nq * log_rss +
             std::log(std::log(nq)) * std::log(static_cast<double>(data.p()) * data.q()) * df;
    case Criterion::kBicp:
      return nq * log_rss + 2.0 * std::log(static_cast<double>(data.p()) * data.q()) * df;
    case Criterion::kGcv: {
      const double denom = nq - df;
      if (!(denom > 0.0)) return kInfiniteScore;
      return nq * rss / (denom * denom);
    }
    case Criterion::kPic: {
      const double denom = nq - 2.0 * df;
      if (!(denom > 0.0)) return kInfiniteScore;
      return rss / denom;
    }
  }
  return kInfiniteScore;
}

namespace {

// Argmin with ties broken toward larger lambda; infinite scores excluded.
std::size_t argmin_trace(const std::vector<double>& trace, const char* method) {
  std::size_t best = trace.size();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (std::isfinite(trace[k]) && (best == trace.size() || trace[k] <= trace[best])) best = k;
  }
  if (best == trace.size()) {
    throw AllScoresInfinite(std::string(method) + ": every grid point scored infinite");
  }
  return best;
}

}  // namespace

SelectionResult select_by_criterion(Criterion kind, const RrrDataset& data,
                                    const ProjectedSpectrum& spectrum, double gamma,
                                    const std::vector<double>& lambdas) {
  SelectionResult result;
  result.method = criterion_name(kind);
  result.score_trace.reserve(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (k + 1 < lambdas.size() && !(lambdas[k] < lambdas[k + 1])) {
      throw UnsortedGrid("lambda grid must be strictly increasing");
    }
    const RrrFit f = fit(data, spectrum, {gamma, lambdas[k]});
    result.score_trace.push_back(criterion_score(kind, data, f, spectrum.design_rank));
  }
  const std::size_t best = argmin_trace(result.score_trace, result.method.c_str());
  result.lambda = lambdas[best];
  result.rank = estimate_rank(spectrum, {gamma, lambdas[best]});
  result.diagnostics["gamma"] = format_double(gamma);
  result.diagnostics["grid_size"] = std::to_string(lambdas.size());
  result.diagnostics["selected_index"] = std::to_string(best);
  return result;
}

SelectionResult select_by_criterion(Criterion kind, const RrrDataset& data, double gamma,
                                    const std::vector<double>& lambdas) {
  return select_by_criterion(kind, data, projected_spectrum(data), gamma, lambdas);
}

SelectionResult kfold_cv(const RrrDataset& data, double gamma, const std::vector<double>& lambdas,
                         int k_folds, RngStream rng) {
  data.validate();
  if (lambdas.empty()) throw UnsortedGrid("lambda grid is empty");
  const int n = static_cast<int>(data.n());
  if (k_folds < 2 || k_folds > n) {
    throw FoldTooSmall("k_folds must satisfy 2 <= k <= n, got " + std::to_string(k_folds));
  }

  // Random permutation, then contiguous chunks; the first n mod k folds take
  // the extra row.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 0; i < n - 1; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
  }
  const int base = n / k_folds;
  const int extra = n % k_folds;

  std::vector<std::vector<double>> fold_scores(k_folds);
  SelectionResult result;
  result.method = "CV";
  int offset = 0;
  for (int f = 0; f < k_folds; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    if (size < 1) throw FoldTooSmall("fold " + std::to_string(f) + " would be empty");
    if (n - size < 2) throw FoldTooSmall("training complement has fewer than 2 rows");
    std::vector<int> test_rows(perm.begin() + offset, perm.begin() + offset + size);
    std::vector<int> train_rows;
    train_rows.reserve(n - size);
    train_rows.insert(train_rows.end(), perm.begin(), perm.begin() + offset);
    train_rows.insert(train_rows.end(), perm.begin() + offset + size, perm.end());
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    offset += size;

    const RrrDataset train = take_rows(data, train_rows);
    const RrrDataset test = take_rows(data, test_rows);
    const ProjectedSpectrum spec = projected_spectrum(train);

    // Predictions for every lambda share the fold's factors:
    // X_test C_hat = [X_test V S^{-1} U_y] diag(g) V_y^T.
    const Eigen::MatrixXd u_y = spec.design_left.transpose() * spec.left_vectors;  // r_x x m
    const Eigen::MatrixXd lhs =
        test.x * (spec.design_right * (spec.design_values.cwiseInverse().asDiagonal() * u_y));
    const Eigen::VectorXd& d = spec.singular_values;
    fold_scores[f].resize(lambdas.size());
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      if (k + 1 < lambdas.size() && !(lambdas[k] < lambdas[k + 1])) {
        throw UnsortedGrid("lambda grid must be strictly increasing");
      }
      const int rank = estimate_rank(d, gamma, lambdas[k]);
      Eigen::VectorXd kept = Eigen::VectorXd::Zero(d.size());
      for (int i = 0; i < rank; ++i) {
        kept(i) = std::max(d(i) - lambdas[k] * std::pow(d(i), -gamma), 0.0);
      }
      const Eigen::MatrixXd pred = lhs * kept.asDiagonal() * spec.right_vectors.transpose();
      fold_scores[f][k] = (test.y - pred).squaredNorm();
    }
  }

  result.score_trace.assign(lambdas.size(), 0.0);
  for (int f = 0; f < k_folds; ++f)
    for (std::size_t k = 0; k < lambdas.size(); ++k)
      result.score_trace[k] += fold_scores[f][k] / k_folds;
  const std::size_t best = argmin_trace(result.score_trace, "CV");
  for (int f = 0; f < k_folds; ++f) {
    result.diagnostics["fold_" + std::to_string(f) + "_score"] = format_double(fold_scores[f][best]);
  }
  result.lambda = lambdas[best];
  result.rank = estimate_rank(projected_spectrum(data), {gamma, lambdas[best]});
  result.diagnostics["gamma"] = format_double(gamma);
  result.diagnostics["k_folds"] = std::to_string(k_folds);
  result.diagnostics["selected_index"] = std::to_string(best);
  return result;
}

}  // namespace rrr
