#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "drate/core.hpp"
#include "drate/stats.hpp"

namespace drate::estimators {

// G-computation / imputation: mean of m1 - m0
inline core::AteEstimate estimate_imp(const core::CausalDataset& d,
                                      const core::NuisanceEstimates& nu) {
  core::AteEstimate e;
  e.method = core::Method::imp;
  e.model = nu.kind;
  Eigen::VectorXd diff = nu.m1_hat - nu.m0_hat;
  e.point = stats::ksum(diff) / static_cast<double>(d.n());
  return e;
}

// Horvitz-Thompson inverse propensity weighting
inline core::AteEstimate estimate_iptw(const core::CausalDataset& d,
                                       const core::NuisanceEstimates& nu) {
  core::AteEstimate e;
  e.method = core::Method::iptw;
  e.model = nu.kind;
  const Eigen::Index n = d.n();
  Eigen::VectorXd contrib(n);
  for (Eigen::Index i = 0; i < n; ++i)
    contrib[i] = d.a[i] * d.y[i] / nu.e_hat[i] -
                 (1.0 - d.a[i]) * d.y[i] / (1.0 - nu.e_hat[i]);
  e.point = stats::ksum(contrib) / static_cast<double>(n);
  return e;
}

// per-unit AIPTW influence contribution (uncentered)
inline double aiptw_contribution(double a, double y, double e, double m1,
                                 double m0) {
  return (a * y / e - (a - e) * m1 / e) -
         ((1.0 - a) * y / (1.0 - e) + (a - e) * m0 / (1.0 - e));
}

// augmented IPTW; doubly robust
inline core::AteEstimate estimate_aiptw(const core::CausalDataset& d,
                                        const core::NuisanceEstimates& nu) {
  core::AteEstimate e;
  e.method = core::Method::aiptw;
  e.model = nu.kind;
  const Eigen::Index n = d.n();
  Eigen::VectorXd contrib(n);
  for (Eigen::Index i = 0; i < n; ++i)
    contrib[i] = aiptw_contribution(d.a[i], d.y[i], nu.e_hat[i], nu.m1_hat[i],
                                    nu.m0_hat[i]);
  e.point = stats::ksum(contrib) / static_cast<double>(n);
  return e;
}

enum class TmleEps { shared, split };
enum class TmleFluctuation { fitted, zero };

struct TmleOptions {
  TmleEps eps = TmleEps::shared;
  TmleFluctuation fluctuation = TmleFluctuation::fitted;
  int max_newton = 100;
  double tol = 1e-10;
};

struct TmleFit {
  core::AteEstimate est;
  Eigen::VectorXd y1_star, y0_star;  // targeted predictions, original scale
  double eps1 = 0.0, eps0 = 0.0;     // shared mode stores the value in both
  bool converged = true;
  double y_lo = 0.0, y_hi = 1.0;     // scaling interval
};

namespace detail {

// one-parameter logistic fluctuation by Newton: response ys in [0,1],
// offset on the logit scale, clever covariate h
inline double fluctuate(const Eigen::VectorXd& ys, const Eigen::VectorXd& off,
                        const Eigen::VectorXd& h, const TmleOptions& opt,
                        bool* converged) {
  double eps = 0.0;
  *converged = false;
  for (int it = 0; it < opt.max_newton; ++it) {
    double score = 0.0, info = 0.0;
    for (Eigen::Index i = 0; i < ys.size(); ++i) {
      const double eta = off[i] + eps * h[i];
      const double p = stats::expit(std::max(-30.0, std::min(30.0, eta)));
      score += h[i] * (ys[i] - p);
      info += h[i] * h[i] * std::max(p * (1.0 - p), 1e-12);
    }
    if (info <= 0.0) break;
    const double step = score / info;
    eps += step;
    if (!std::isfinite(eps) || std::abs(eps) > 1e3) {
      *converged = false;
      return 0.0;
    }
    if (std::abs(step) < opt.tol) {
      *converged = true;
      break;
    }
  }
  return eps;
}

}  // namespace detail

// Targeted maximum likelihood: logistic fluctuation of the scaled outcome
// regressions along the clever covariates H1 = A/e, H0 = -(1-A)/(1-e),
// then plug-in on the updated fits. Fluctuation failure falls back to the
// initial fit (flagged via `converged`).
inline TmleFit estimate_tmle(const core::CausalDataset& d,
                             const core::NuisanceEstimates& nu,
                             const TmleOptions& opt = {}) {
  const Eigen::Index n = d.n();
  TmleFit fit;
  fit.est.method = core::Method::tmle;
  fit.est.model = nu.kind;

  const double ymin = d.y.minCoeff(), ymax = d.y.maxCoeff();
  const bool binary_y = [&] {
    for (Eigen::Index i = 0; i < n; ++i)
      if (d.y[i] != 0.0 && d.y[i] != 1.0) return false;
    return true;
  }();

  auto finish_zero = [&] {
    // zero fluctuation: exactly the initial plug-in
    fit.y1_star = nu.m1_hat;
    fit.y0_star = nu.m0_hat;
    Eigen::VectorXd diff = fit.y1_star - fit.y0_star;
    fit.est.point = stats::ksum(diff) / static_cast<double>(n);
    return fit;
  };

  if (opt.fluctuation == TmleFluctuation::zero) return finish_zero();

  double lo, hi;
  if (binary_y) {
    lo = 0.0;
    hi = 1.0;
  } else {
    const double range = ymax - ymin;
    if (range < 1e-12) return finish_zero();  // constant outcome
    lo = ymin - 1e-3 * range;
    hi = ymax + 1e-3 * range;
  }
  fit.y_lo = lo;
  fit.y_hi = hi;
  const double span = hi - lo;

  Eigen::VectorXd ys(n), m1s(n), m0s(n), off_obs(n), h_obs(n), h1(n), h0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ys[i] = (d.y[i] - lo) / span;
    m1s[i] = stats::clamp01((nu.m1_hat[i] - lo) / span, 1e-6);
    m0s[i] = stats::clamp01((nu.m0_hat[i] - lo) / span, 1e-6);
    h1[i] = 1.0 / nu.e_hat[i];
    h0[i] = -1.0 / (1.0 - nu.e_hat[i]);
    const bool treated = d.a[i] == 1.0;
    off_obs[i] = stats::logit(treated ? m1s[i] : m0s[i]);
    h_obs[i] = treated ? h1[i] : h0[i];
  }

  double e1 = 0.0, e0 = 0.0;
  bool conv = true;
  if (opt.eps == TmleEps::shared) {
    bool c = false;
    const double eps = detail::fluctuate(ys, off_obs, h_obs, opt, &c);
    conv = c;
    e1 = e0 = eps;
  } else {
    // per-arm fluctuations on the observed-arm subsets
    for (int arm = 0; arm <= 1; ++arm) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index i = 0; i < n; ++i)
        if (static_cast<int>(d.a[i]) == arm) rows.push_back(i);
      Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
      Eigen::VectorXd oa(ya.size()), ha(ya.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        ya[static_cast<Eigen::Index>(r)] = ys[rows[r]];
        oa[static_cast<Eigen::Index>(r)] = off_obs[rows[r]];
        ha[static_cast<Eigen::Index>(r)] = h_obs[rows[r]];
      }
      bool c = false;
      const double eps = detail::fluctuate(ya, oa, ha, opt, &c);
      conv = conv && c;
      (arm == 1 ? e1 : e0) = eps;
    }
  }
  fit.converged = conv;
  if (!conv) return finish_zero();
  fit.eps1 = e1;
  fit.eps0 = e0;

  fit.y1_star.resize(n);
  fit.y0_star.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q1 = stats::expit(stats::logit(m1s[i]) + e1 * h1[i]);
    const double q0 = stats::expit(stats::logit(m0s[i]) + e0 * h0[i]);
    fit.y1_star[i] = lo + span * q1;
    fit.y0_star[i] = lo + span * q0;
  }
  Eigen::VectorXd diff = fit.y1_star - fit.y0_star;
  fit.est.point = stats::ksum(diff) / static_cast<double>(n);
  return fit;
}

}  // namespace drate::estimators
