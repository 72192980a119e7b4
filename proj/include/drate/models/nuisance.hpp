#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "drate/core.hpp"
#include "drate/models/family.hpp"
#include "drate/models/gam.hpp"
#include "drate/models/linear.hpp"
#include "drate/models/logistic.hpp"
#include "drate/models/superlearner.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

namespace drate::models {

struct NuisanceOptions {
  core::ModelKind kind = core::ModelKind::glm;
  std::vector<int> selected;  // outcome-model covariates (empty -> intercept)
  std::uint64_t seed = 0;
  int sl_folds = 10;
  GbtParams gbt;
};

namespace detail {

inline Eigen::MatrixXd take_cols(const Eigen::MatrixXd& x,
                                 const std::vector<int>& cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
  return out;
}

}  // namespace detail

// Fits e(X) on all covariates and m1/m0 on the selected columns per arm,
// evaluates everything on the full sample, clamps the propensity away from
// the boundary. The seed splits deterministically per sub-fit.
inline core::NuisanceEstimates fit_nuisances(const core::CausalDataset& d,
                                             const NuisanceOptions& opt) {
  core::NuisanceEstimates out;
  out.kind = opt.kind;

  // ---- propensity on all covariates ----
  switch (opt.kind) {
    case core::ModelKind::glm: {
      const auto ps = fit_logit(d.x, d.a);
      out.ps_separation = ps.separation;
      out.e_hat = ps.predict_proba(d.x);
      break;
    }
    case core::ModelKind::gam: {
      const auto ps = fit_gam(d.x, d.a, Family::binomial);
      out.e_hat = ps.predict(d.x);
      break;
    }
    case core::ModelKind::sl: {
      SlOptions so;
      so.folds = opt.sl_folds;
      so.seed = rng::key(opt.seed, 0xE0ull);
      so.gbt = opt.gbt;
      const auto ps = fit_superlearner(d.x, d.a, Family::binomial, so, d.ids);
      out.e_hat = ps.predict(d.x);
      break;
    }
  }
  out.clamped = 0;
  for (Eigen::Index i = 0; i < out.e_hat.size(); ++i) {
    const double e = out.e_hat[i];
    const double c = std::min(1.0 - core::kPsClamp,
                              std::max(core::kPsClamp, e));
    if (c != e) ++out.clamped;
    out.e_hat[i] = c;
  }

  // ---- outcome regressions per arm on the selected columns ----
  out.empty_selection = opt.selected.empty();
  const Eigen::MatrixXd xs = detail::take_cols(d.x, opt.selected);
  for (int arm = 0; arm <= 1; ++arm) {
    const auto rows = d.arm_rows_by_id(arm);
    Eigen::VectorXd& target = arm == 1 ? out.m1_hat : out.m0_hat;
    Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      ya[static_cast<Eigen::Index>(r)] = d.y[rows[r]];

    if (opt.selected.empty()) {
      target = Eigen::VectorXd::Constant(d.n(), stats::mean(ya));
      continue;
    }
    Eigen::MatrixXd xa(static_cast<Eigen::Index>(rows.size()), xs.cols());
    std::vector<std::uint64_t> keys(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      xa.row(static_cast<Eigen::Index>(r)) = xs.row(rows[r]);
      keys[r] = d.ids[static_cast<std::size_t>(rows[r])];
    }
    switch (opt.kind) {
      case core::ModelKind::glm: {
        const auto m = fit_ols(xa, ya);
        target = m.predict(xs);
        break;
      }
      case core::ModelKind::gam: {
        const auto m = fit_gam(xa, ya, Family::gaussian);
        target = m.predict(xs);
        break;
      }
      case core::ModelKind::sl: {
        SlOptions so;
        so.folds = opt.sl_folds;
        so.seed = rng::key(opt.seed, arm == 1 ? 0xA1ull : 0xA0ull);
        so.gbt = opt.gbt;
        const auto m = fit_superlearner(xa, ya, Family::gaussian, so, keys);
        target = m.predict(xs);
        break;
      }
    }
  }

  if (!out.m1_hat.allFinite() || !out.m0_hat.allFinite())
    throw core::EstimationError("nuisance: non-finite outcome predictions");
  return out;
}

}  // namespace drate::models
