#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "drate/core.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

namespace drate::models {

struct LassoOptions {
  int path_length = 100;
  double lambda_min_ratio = 1e-3;
  int folds = 5;
  double tol = 1e-7;
  int max_sweeps = 1000;
  std::uint64_t seed = 0;
};

namespace detail {

// coordinate descent over a standardized design (columns mean 0, 1/n-var 1),
// centered response; active-set sweeps with a full pass to confirm
struct LassoWork {
  Eigen::MatrixXd z;       // standardized design
  Eigen::VectorXd yc;      // centered response
  Eigen::VectorXd mu, sd;  // column moments (original scale)
  double ybar = 0.0;
  std::vector<int> live;   // columns with positive variance
};

inline LassoWork standardize(const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size(), p = x.cols();
  LassoWork w;
  w.z.resize(n, p);
  w.mu.resize(p);
  w.sd.resize(p);
  const double dn = static_cast<double>(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    w.mu[j] = x.col(j).sum() / dn;
    Eigen::VectorXd c = x.col(j).array() - w.mu[j];
    const double v = c.squaredNorm() / dn;
    if (v > 1e-14) {
      w.sd[j] = std::sqrt(v);
      w.z.col(j) = c / w.sd[j];
      w.live.push_back(static_cast<int>(j));
    } else {
      w.sd[j] = 0.0;
      w.z.col(j).setZero();
    }
  }
  w.ybar = y.sum() / dn;
  w.yc = y.array() - w.ybar;
  return w;
}

// one lambda, warm started; residual-update coordinate descent
inline void cd_fit(const LassoWork& w, double lambda, Eigen::VectorXd& beta,
                   Eigen::VectorXd& resid, const LassoOptions& opt) {
  const double dn = static_cast<double>(w.yc.size());
  auto sweep = [&](const std::vector<int>& cols) {
    double max_delta = 0.0;
    for (int j : cols) {
      const double bj = beta[j];
      const double rho = w.z.col(j).dot(resid) / dn + bj;
      double nb = 0.0;
      if (rho > lambda)
        nb = rho - lambda;
      else if (rho < -lambda)
        nb = rho + lambda;
      if (nb != bj) {
        resid += w.z.col(j) * (bj - nb);
        beta[j] = nb;
        max_delta = std::max(max_delta, std::abs(nb - bj));
      }
    }
    return max_delta;
  };
  for (int pass = 0; pass < opt.max_sweeps; ++pass) {
    if (sweep(w.live) < opt.tol) break;
    std::vector<int> active;
    for (int j : w.live)
      if (beta[j] != 0.0) active.push_back(j);
    for (int inner = 0; inner < opt.max_sweeps; ++inner)
      if (sweep(active) < opt.tol) break;
  }
}

}  // namespace detail

struct LassoPath {
  Eigen::VectorXd lambdas;        // descending
  Eigen::MatrixXd betas;          // p x path, standardized scale
  double lambda_max = 0.0;
};

inline LassoPath lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const LassoOptions& opt = {}) {
  const Eigen::Index p = x.cols();
  auto w = detail::standardize(x, y);
  LassoPath path;
  const double dn = static_cast<double>(y.size());
  double lmax = 0.0;
  for (int j : w.live)
    lmax = std::max(lmax, std::abs(w.z.col(j).dot(w.yc)) / dn);
  path.lambda_max = lmax;
  path.lambdas.resize(opt.path_length);
  path.betas = Eigen::MatrixXd::Zero(p, opt.path_length);
  if (lmax <= 0.0) {  // constant response: empty path
    path.lambdas.setZero();
    return path;
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = w.yc;
  for (int g = 0; g < opt.path_length; ++g) {
    const double lam =
        lmax * std::pow(opt.lambda_min_ratio,
                        static_cast<double>(g) /
                            static_cast<double>(opt.path_length - 1));
    path.lambdas[g] = lam;
    detail::cd_fit(w, lam, beta, resid, opt);
    path.betas.col(g) = beta;
  }
  return path;
}

// 5-fold CV along the path, 1-SE rule, refit on the full data at the chosen
// lambda; returns indices of nonzero coefficients (sorted ascending).
inline std::vector<int> select_outcome_predictors(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
    const LassoOptions& opt = {},
    const std::vector<std::uint64_t>& row_keys = {}) {
  const Eigen::Index n = y.size(), p = x.cols();
  if (x.rows() != n) throw core::DataError("lasso: row count mismatch");
  if (n < 2 * opt.folds) throw core::EstimationError("lasso: too few rows");
  if (stats::variance(y) < 1e-14) return {};

  std::vector<std::uint64_t> keys = row_keys;
  if (keys.empty()) {
    keys.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      keys[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
  }
  const auto fold = rng::fold_assignment(rng::key(opt.seed, 0x1A550ull), keys,
                                         opt.folds);

  // shared lambda grid from the full data
  const auto full = lasso_path(x, y, opt);
  if (full.lambda_max <= 0.0) return {};
  const int path_len = opt.path_length;

  Eigen::MatrixXd fold_mse =
      Eigen::MatrixXd::Zero(opt.folds, path_len);
  for (int f = 0; f < opt.folds; ++f) {
    std::vector<Eigen::Index> tr, va;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold[static_cast<std::size_t>(i)] == f ? va : tr).push_back(i);
    if (va.empty() || tr.size() < 2) continue;
    Eigen::MatrixXd xt(static_cast<Eigen::Index>(tr.size()), p);
    Eigen::VectorXd yt(static_cast<Eigen::Index>(tr.size()));
    for (std::size_t r = 0; r < tr.size(); ++r) {
      xt.row(static_cast<Eigen::Index>(r)) = x.row(tr[r]);
      yt[static_cast<Eigen::Index>(r)] = y[tr[r]];
    }
    auto w = detail::standardize(xt, yt);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = w.yc;
    for (int g = 0; g < path_len; ++g) {
      detail::cd_fit(w, full.lambdas[g], beta, resid, opt);
      double se = 0.0;
      for (Eigen::Index i : va) {
        double pred = w.ybar;
        for (int j : w.live)
          pred += beta[j] * (x(i, j) - w.mu[j]) / w.sd[j];
        const double err = y[i] - pred;
        se += err * err;
      }
      fold_mse(f, g) = se / static_cast<double>(va.size());
    }
  }

  Eigen::VectorXd cv = fold_mse.colwise().mean();
  int g_min = 0;
  for (int g = 1; g < path_len; ++g)
    if (cv[g] < cv[g_min]) g_min = g;
  // SE of the CV estimate at the minimizer
  double se_min = 0.0;
  {
    const double m = cv[g_min];
    double acc = 0.0;
    for (int f = 0; f < opt.folds; ++f) {
      const double d = fold_mse(f, g_min) - m;
      acc += d * d;
    }
    se_min = std::sqrt(acc / (opt.folds - 1)) /
             std::sqrt(static_cast<double>(opt.folds));
  }
  // 1-SE rule: sparsest lambda within one SE of the minimum
  int g_pick = g_min;
  for (int g = 0; g <= g_min; ++g) {
    if (cv[g] <= cv[g_min] + se_min) {
      g_pick = g;
      break;
    }
  }

  std::vector<int> selected;
  for (Eigen::Index j = 0; j < p; ++j)
    if (full.betas(j, g_pick) != 0.0) selected.push_back(static_cast<int>(j));
  return selected;
}

// per-arm selection, unioned (the form the estimation pipeline consumes)
inline std::vector<int> select_union_by_arm(const core::CausalDataset& d,
                                            const LassoOptions& opt = {}) {
  std::vector<int> out;
  for (int arm = 0; arm <= 1; ++arm) {
    const auto rows = d.arm_rows_by_id(arm);
    Eigen::MatrixXd xa(static_cast<Eigen::Index>(rows.size()), d.p());
    Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
    std::vector<std::uint64_t> keys(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      xa.row(static_cast<Eigen::Index>(r)) = d.x.row(rows[r]);
      ya[static_cast<Eigen::Index>(r)] = d.y[rows[r]];
      keys[r] = d.ids[static_cast<std::size_t>(rows[r])];
    }
    LassoOptions o = opt;
    o.seed = rng::key(opt.seed, static_cast<std::uint64_t>(arm) + 0xA53ull);
    const auto sel = select_outcome_predictors(xa, ya, o, keys);
    out.insert(out.end(), sel.begin(), sel.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace drate::models
