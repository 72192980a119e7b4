#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "drate/core.hpp"

namespace drate::models {

// OLS with an implicit leading intercept. p = 0 gives the intercept-only
// model (fit = mean of y), which downstream code leans on when covariate
// selection comes back empty.
struct LinearModel {
  Eigen::VectorXd beta;  // size p+1, intercept first

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out =
        Eigen::VectorXd::Constant(x.rows(), beta[0]);
    if (beta.size() > 1) out += x * beta.tail(beta.size() - 1);
    return out;
  }
};

inline LinearModel fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = x.cols();
  if (x.rows() != n) throw core::DataError("ols: row count mismatch");
  if (n <= p + 1)
    throw core::EstimationError("ols: need n > p + 1 rows");
  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  if (p > 0) design.rightCols(p) = x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p + 1)
    throw core::RankDeficientError("ols: design is rank deficient");
  LinearModel m;
  m.beta = qr.solve(y);
  return m;
}

}  // namespace drate::models
