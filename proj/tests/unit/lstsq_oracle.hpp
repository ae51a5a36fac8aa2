#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace fracsource::testing {

// argmin ||W^(1/2)(J x - r)||^2 + rho x' G x via a stacked QR least-squares solve.
inline Eigen::VectorXd dense_tikhonov(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r,
                                      const Eigen::VectorXd& w, const Eigen::MatrixXd& gram, double rho) {
  const Eigen::Index m = jac.rows(), n = jac.cols();
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(gram).matrixL();
  Eigen::MatrixXd a(m + n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + n);
  const Eigen::VectorXd sw = w.cwiseSqrt();
  a.topRows(m) = sw.asDiagonal() * jac;
  a.bottomRows(n) = std::sqrt(rho) * l.transpose();
  b.head(m) = sw.cwiseProduct(r);
  return a.colPivHouseholderQr().solve(b);
}

}  // namespace fracsource::testing
