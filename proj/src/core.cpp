#include "rrr/core.hpp"

#include <Eigen/SVD>
#include <limits>

#include "rrr/errors.hpp"

namespace rrr {

namespace {

double rank_cutoff(const Eigen::VectorXd& design_values, Eigen::Index n, Eigen::Index p,
                   double tolerance) {
  if (design_values.size() == 0) return 0.0;
  if (tolerance > 0.0) return tolerance;
  // Default numerical-rank convention.
  return static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon() *
         design_values(0);
}

}  // namespace

Eigen::MatrixXd ProjectedSpectrum::pseudo_inverse_apply(const Eigen::MatrixXd& rhs) const {
  // X^+ rhs = V S^{-1} Q^T rhs
  return design_right *
         (design_values.cwiseInverse().asDiagonal() * (design_left.transpose() * rhs));
}

ProjectedSpectrum projected_spectrum(const RrrDataset& data, double tolerance) {
  data.validate();
  if (data.x.isZero(0.0)) throw DegenerateDesign("design matrix is identically zero");

  Eigen::BDCSVD<Eigen::MatrixXd> xsvd(data.x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& xvals = xsvd.singularValues();
  const double cutoff = rank_cutoff(xvals, data.n(), data.p(), tolerance);
  int r_x = 0;
  while (r_x < xvals.size() && xvals(r_x) > cutoff) ++r_x;
  if (r_x == 0) throw DegenerateDesign("design matrix has numerical rank zero");

  ProjectedSpectrum out;
  out.design_rank = r_x;
  out.design_left = xsvd.matrixU().leftCols(r_x);
  out.design_values = xvals.head(r_x);
  out.design_right = xsvd.matrixV().leftCols(r_x);

  // Spectrum of PY through the basis: PY = Q (Q^T Y), and Q^T Y shares PY's
  // nonzero singular structure.
  const Eigen::MatrixXd qty = out.design_left.transpose() * data.y;
  Eigen::BDCSVD<Eigen::MatrixXd> ysvd(qty, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index m = std::min<Eigen::Index>(r_x, data.q());
  out.singular_values = ysvd.singularValues().head(m);
  out.left_vectors = out.design_left * ysvd.matrixU().leftCols(m);
  out.right_vectors = ysvd.matrixV().leftCols(m);
  return out;
}

ProjectedValues projected_singular_values(const RrrDataset& data, double tolerance) {
  data.validate();
  if (data.x.isZero(0.0)) throw DegenerateDesign("design matrix is identically zero");

  Eigen::BDCSVD<Eigen::MatrixXd> xsvd(data.x, Eigen::ComputeThinU);
  const Eigen::VectorXd& xvals = xsvd.singularValues();
  const double cutoff = rank_cutoff(xvals, data.n(), data.p(), tolerance);
  int r_x = 0;
  while (r_x < xvals.size() && xvals(r_x) > cutoff) ++r_x;
  if (r_x == 0) throw DegenerateDesign("design matrix has numerical rank zero");

  const Eigen::MatrixXd qty = xsvd.matrixU().leftCols(r_x).transpose() * data.y;
  Eigen::BDCSVD<Eigen::MatrixXd> ysvd(qty);
  const Eigen::Index m = std::min<Eigen::Index>(r_x, data.q());
  ProjectedValues out;
  out.design_rank = r_x;
  out.singular_values = ysvd.singularValues().head(m);
  return out;
}

}  // namespace rrr
