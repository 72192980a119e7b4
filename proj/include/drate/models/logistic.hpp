#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "drate/core.hpp"
#include "drate/stats.hpp"

namespace drate::models {

struct LogisticModel {
  Eigen::VectorXd beta;  // original scale, intercept first
  bool converged = false;
  bool separation = false;  // |standardized coef| blew past the guard rail
  int iterations = 0;
  double deviance = 0.0;

  Eigen::VectorXd linear(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(x.rows(), beta[0]);
    if (beta.size() > 1) eta += x * beta.tail(beta.size() - 1);
    return eta;
  }

  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd eta = linear(x);
    for (Eigen::Index i = 0; i < eta.size(); ++i)
      eta[i] = stats::expit(eta[i]);
    return eta;
  }
};

struct LogitOptions {
  int max_iterations = 100;
  double tol = 1e-8;
  double separation_bound = 30.0;  // on the standardized design
};

// IRLS on an internally standardized design (stability + a scale-free
// separation check), coefficients returned on the original scale.
inline LogisticModel fit_logit(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& y,
                               const LogitOptions& opt = {}) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = x.cols();
  if (x.rows() != n) throw core::DataError("logit: row count mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] != 0.0 && y[i] != 1.0)
      throw core::DataError("logit: response must be 0/1");

  // standardize; (near-)constant columns are zeroed out of the fit
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p), sd = Eigen::VectorXd::Ones(p);
  Eigen::MatrixXd z(n, p + 1);
  z.col(0).setOnes();
  std::vector<bool> active(static_cast<std::size_t>(p), true);
  for (Eigen::Index j = 0; j < p; ++j) {
    mu[j] = stats::mean(x.col(j));
    const double s = std::sqrt(stats::variance(x.col(j)));
    if (!(s > 1e-12)) {
      active[static_cast<std::size_t>(j)] = false;
      z.col(j + 1).setZero();
    } else {
      sd[j] = s;
      z.col(j + 1) = (x.col(j).array() - mu[j]) / s;
    }
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd eta(n), prob(n), w(n), grad(p + 1);
  Eigen::MatrixXd info(p + 1, p + 1);
  LogisticModel m;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    eta = z * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::max(-30.0, std::min(30.0, eta[i]));
      prob[i] = stats::expit(e);
      w[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-10);
    }
    grad = z.transpose() * (y - prob);
    info = z.transpose() * w.asDiagonal() * z;
    info.diagonal().array() += 1e-10;
    const Eigen::VectorXd step = info.ldlt().solve(grad);
    beta += step;
    m.iterations = it;
    if (step.cwiseAbs().maxCoeff() < opt.tol) {
      m.converged = true;
      break;
    }
  }
  if (beta.cwiseAbs().maxCoeff() > opt.separation_bound) {
    m.separation = true;
    m.converged = false;
  }

  // back to original scale
  m.beta = Eigen::VectorXd::Zero(p + 1);
  m.beta[0] = beta[0];
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!active[static_cast<std::size_t>(j)]) continue;
    m.beta[j + 1] = beta[j + 1] / sd[j];
    m.beta[0] -= beta[j + 1] * mu[j] / sd[j];
  }

  Eigen::VectorXd ph = m.predict_proba(x);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = stats::clamp01(ph[i], 1e-12);
    dev -= 2.0 * (y[i] * std::log(pi) + (1.0 - y[i]) * std::log(1.0 - pi));
  }
  m.deviance = dev;
  return m;
}

}  // namespace drate::models
