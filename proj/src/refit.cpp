#include "rrr/refit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <limits>

#include "rrr/errors.hpp"

namespace rrr {

double default_ridge(const RrrDataset& train) {
  const Eigen::MatrixXd xc = train.x.rowwise() - train.x.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xc.transpose() * xc,
                                                     Eigen::EigenvaluesOnly);
  return 1e-3 * eig.eigenvalues().maxCoeff() / static_cast<double>(train.n());
}

RefitModel refit_ridge_rrr(const RrrDataset& train, int k, double t) {
  train.validate();
  const Eigen::Index p = train.p();
  const Eigen::Index q = train.q();
  if (k < 0 || k > std::min(p, q)) {
    throw std::invalid_argument("refit rank must lie in [0, min(p, q)]");
  }
  if (t < 0.0) throw std::invalid_argument("ridge parameter must be nonnegative");

  const Eigen::RowVectorXd x_mean = train.x.colwise().mean();
  const Eigen::RowVectorXd y_mean = train.y.colwise().mean();

  RefitModel model;
  model.rank = k;
  model.ridge = t;
  if (k == 0) {
    model.coefficient = Eigen::MatrixXd::Zero(p, q);
    model.intercept = y_mean.transpose();
    return model;
  }

  const Eigen::MatrixXd xc = train.x.rowwise() - x_mean;
  const Eigen::MatrixXd yc = train.y.rowwise() - y_mean;
  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += t;

  Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw SingularCovariance("Cholesky factorization of the ridge Gram matrix failed");
  }
  if (t == 0.0) {
    const Eigen::VectorXd diag = solver.vectorD();
    const double dmax = diag.cwiseAbs().maxCoeff();
    if (!(diag.minCoeff() > static_cast<double>(p) * std::numeric_limits<double>::epsilon() * dmax)) {
      throw SingularCovariance("X^T X is numerically singular; use t > 0");
    }
  }

  // Unrestricted solution, then projection of the fitted directions onto the
  // top-k eigenvectors of Sigma_yx Sigma_xx^{-1} Sigma_xy.
  const Eigen::MatrixXd c_ols = solver.solve(xc.transpose() * yc);  // p x q
  const Eigen::MatrixXd m = yc.transpose() * xc * c_ols;            // q x q, PSD
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((m + m.transpose()) / 2.0);
  // eigenvalues ascending: the top-k are the trailing columns
  const Eigen::MatrixXd v_k = eig.eigenvectors().rightCols(k);
  model.coefficient = c_ols * (v_k * v_k.transpose());
  model.intercept = (y_mean - x_mean * model.coefficient).transpose();
  return model;
}

Eigen::MatrixXd predict(const RefitModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.coefficient.rows()) {
    throw ShapeMismatch("prediction input has " + std::to_string(x.cols()) +
                        " columns, model expects " + std::to_string(model.coefficient.rows()));
  }
  return (x * model.coefficient).rowwise() + model.intercept.transpose();
}

double mspe(const RefitModel& model, const RrrDataset& test) {
  if (test.y.cols() != model.coefficient.cols()) {
    throw ShapeMismatch("test response has " + std::to_string(test.y.cols()) +
                        " columns, model expects " + std::to_string(model.coefficient.cols()));
  }
  const Eigen::MatrixXd pred = predict(model, test.x);
  const double nq = static_cast<double>(test.y.rows()) * static_cast<double>(test.y.cols());
  return 100.0 * (test.y - pred).squaredNorm() / nq;
}

}  // namespace rrr
