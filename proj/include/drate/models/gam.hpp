#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "drate/core.hpp"
#include "drate/models/family.hpp"
#include "drate/models/spline.hpp"
#include "drate/stats.hpp"

namespace drate::models {

struct GamOptions {
  int knots = 5;
  int grid = 20;                 // log-spaced ridge grid
  double lambda_lo = 1e-4;
  double lambda_hi = 1e4;
  int max_pirls = 50;
  double tol = 1e-8;
};

// Additive model: intercept + per-covariate (linear + natural-cubic
// curvature) blocks. One shared ridge penalty on all curvature columns,
// chosen by GCV on a log grid; binomial fits run PIRLS with the grid search
// on the converged working problem (performance iteration).
struct AdditiveModel {
  struct Block {
    bool smooth = false;             // false -> single linear column
    std::vector<double> knots;       // for smooth blocks
  };
  std::vector<Block> blocks;
  Eigen::VectorXd beta;              // assembled-design coefficients
  Family family = Family::gaussian;
  double lambda = 0.0;
  double gcv = std::numeric_limits<double>::quiet_NaN();
  bool converged = true;
  bool small_sample = false;         // n < 10 p warning flag

  Eigen::MatrixXd design(const Eigen::MatrixXd& x) const {
    Eigen::Index cols = 1;
    for (const auto& b : blocks)
      cols += b.smooth ? static_cast<Eigen::Index>(b.knots.size()) - 1 : 1;
    Eigen::MatrixXd d(x.rows(), cols);
    d.col(0).setOnes();
    Eigen::Index at = 1;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      const auto& b = blocks[j];
      const Eigen::VectorXd xj = x.col(static_cast<Eigen::Index>(j));
      d.col(at++) = xj;
      if (b.smooth) {
        const Eigen::MatrixXd c = ncs_curvature(xj, b.knots);
        d.middleCols(at, c.cols()) = c;
        at += c.cols();
      }
    }
    return d;
  }

  Eigen::VectorXd linear(const Eigen::MatrixXd& x) const {
    return design(x) * beta;
  }

  // response scale: probabilities for binomial
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd eta = linear(x);
    if (family == Family::binomial)
      for (Eigen::Index i = 0; i < eta.size(); ++i)
        eta[i] = stats::expit(eta[i]);
    return eta;
  }
};

namespace detail {

// min-GCV ridge on a (weighted) gaussian problem given assembled design
struct RidgeScan {
  Eigen::VectorXd beta;
  double lambda = 0.0;
  double gcv = 0.0;
  double edf = 0.0;
  double rss = 0.0;
};

inline RidgeScan gcv_ridge(const Eigen::MatrixXd& xtx,
                           const Eigen::VectorXd& xty, double yty, double n,
                           const Eigen::VectorXd& penalty,
                           const GamOptions& opt) {
  RidgeScan best;
  double best_gcv = std::numeric_limits<double>::infinity();
  for (int g = 0; g < opt.grid; ++g) {
    const double lam =
        std::exp(std::log(opt.lambda_lo) +
                 (std::log(opt.lambda_hi) - std::log(opt.lambda_lo)) *
                     static_cast<double>(g) /
                     static_cast<double>(opt.grid - 1));
    Eigen::MatrixXd m = xtx;
    m.diagonal() += lam * penalty;
    m.diagonal().array() += 1e-10;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success)
      throw core::RankDeficientError("gam: penalized normal equations failed");
    const Eigen::VectorXd beta = ldlt.solve(xty);
    const Eigen::MatrixXd z = ldlt.solve(xtx);  // (XtWX + lam P)^-1 XtWX
    const double edf = z.trace();
    const double rss =
        std::max(0.0, yty - 2.0 * beta.dot(xty) + beta.dot(xtx * beta));
    const double denom = n - edf;
    if (denom <= 1.0) continue;
    const double gcv = n * rss / (denom * denom);
    if (gcv < best_gcv) {
      best_gcv = gcv;
      best = {beta, lam, gcv, edf, rss};
    }
  }
  if (!best.beta.size())
    throw core::RankDeficientError("gam: no admissible ridge fit");
  return best;
}

}  // namespace detail

inline AdditiveModel fit_gam(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             Family family, const GamOptions& opt = {}) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = x.cols();
  if (x.rows() != n) throw core::DataError("gam: row count mismatch");
  if (n < 20) throw core::EstimationError("gam: too few rows");

  AdditiveModel m;
  m.family = family;
  m.small_sample = n < 10 * p;
  m.blocks.resize(static_cast<std::size_t>(p));
  Eigen::Index cols = 1;
  for (Eigen::Index j = 0; j < p; ++j) {
    auto& b = m.blocks[static_cast<std::size_t>(j)];
    if (!essentially_binary(x.col(j))) {
      auto kn = quantile_knots(x.col(j), opt.knots);
      if (kn.size() >= 3) {
        b.smooth = true;
        b.knots = std::move(kn);
      }
    }
    cols += b.smooth ? static_cast<Eigen::Index>(b.knots.size()) - 1 : 1;
  }

  const Eigen::MatrixXd d = m.design(x);
  // penalty indicator: curvature columns only
  Eigen::VectorXd penalty = Eigen::VectorXd::Zero(cols);
  {
    Eigen::Index at = 1;
    for (const auto& b : m.blocks) {
      ++at;  // linear column unpenalized
      if (b.smooth) {
        const auto k = static_cast<Eigen::Index>(b.knots.size()) - 2;
        penalty.segment(at, k).setOnes();
        at += k;
      }
    }
  }

  if (family == Family::gaussian) {
    const Eigen::MatrixXd xtx = d.transpose() * d;
    const Eigen::VectorXd xty = d.transpose() * y;
    const auto scan = detail::gcv_ridge(xtx, xty, y.squaredNorm(),
                                        static_cast<double>(n), penalty, opt);
    m.beta = scan.beta;
    m.lambda = scan.lambda;
    m.gcv = scan.gcv;
    if (!m.beta.allFinite())
      throw core::RankDeficientError("gam: non-finite coefficients");
    return m;
  }

  // binomial PIRLS at a pilot lambda, GCV scan on the converged working
  // problem, then PIRLS to convergence at the chosen lambda
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] != 0.0 && y[i] != 1.0)
      throw core::DataError("gam: binomial response must be 0/1");

  auto pirls = [&](double lam, Eigen::VectorXd beta0,
                   Eigen::MatrixXd* xtwx_out, Eigen::VectorXd* xtwz_out,
                   double* ztwz_out, bool* conv) -> Eigen::VectorXd {
    Eigen::VectorXd beta = std::move(beta0);
    if (beta.size() != cols) {
      beta = Eigen::VectorXd::Zero(cols);
      beta[0] = stats::logit(stats::clamp01(stats::mean(y), 1e-6));
    }
    Eigen::VectorXd eta(n), prob(n), w(n), z(n);
    *conv = false;
    for (int it = 0; it < opt.max_pirls; ++it) {
      eta = d * beta;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double e = std::max(-30.0, std::min(30.0, eta[i]));
        prob[i] = stats::expit(e);
        w[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-10);
        z[i] = e + (y[i] - prob[i]) / w[i];
      }
      Eigen::MatrixXd xtwx =
          d.transpose() * w.asDiagonal() * d;
      Eigen::VectorXd xtwz = d.transpose() * (w.array() * z.array()).matrix();
      Eigen::MatrixXd mreg = xtwx;
      mreg.diagonal() += lam * penalty;
      mreg.diagonal().array() += 1e-10;
      const Eigen::VectorXd next = mreg.ldlt().solve(xtwz);
      const double delta = (next - beta).cwiseAbs().maxCoeff();
      beta = next;
      if (delta < opt.tol) {
        *conv = true;
        if (xtwx_out) {
          *xtwx_out = std::move(xtwx);
          *xtwz_out = std::move(xtwz);
          *ztwz_out = (w.array() * z.array() * z.array()).sum();
        }
        break;
      }
      if (it + 1 == opt.max_pirls && xtwx_out) {
        *xtwx_out = std::move(xtwx);
        *xtwz_out = std::move(xtwz);
        *ztwz_out = (w.array() * z.array() * z.array()).sum();
      }
    }
    return beta;
  };

  Eigen::MatrixXd xtwx;
  Eigen::VectorXd xtwz;
  double ztwz = 0.0;
  bool conv = false;
  Eigen::VectorXd pilot =
      pirls(1.0, Eigen::VectorXd(), &xtwx, &xtwz, &ztwz, &conv);
  const auto scan = detail::gcv_ridge(xtwx, xtwz, ztwz,
                                      static_cast<double>(n), penalty, opt);
  bool conv2 = false;
  m.beta = pirls(scan.lambda, pilot, nullptr, nullptr, nullptr, &conv2);
  m.lambda = scan.lambda;
  m.gcv = scan.gcv;
  m.converged = conv2;
  if (!m.beta.allFinite())
    throw core::RankDeficientError("gam: non-finite coefficients");
  return m;
}

}  // namespace drate::models
