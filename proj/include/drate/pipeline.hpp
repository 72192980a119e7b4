#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "drate/core.hpp"
#include "drate/estimators/ate.hpp"
#include "drate/estimators/dsm.hpp"
#include "drate/estimators/pencomp.hpp"
#include "drate/inference.hpp"
#include "drate/models/lasso.hpp"
#include "drate/models/nuisance.hpp"

namespace drate::pipeline {

struct Settings {
  std::vector<core::Method> methods{core::Method::imp,  core::Method::iptw,
                                    core::Method::aiptw, core::Method::tmle,
                                    core::Method::dsm,  core::Method::pencomp};
  std::vector<core::ModelKind> kinds{core::ModelKind::glm};
  int boot = 200;        // 0/1 disables resampling-based intervals
  double level = 0.95;
  std::uint64_t seed = 0;
  estimators::TmleOptions tmle;
  int dsm_m = 1;
  int lasso_folds = 5;
  int sl_folds = 10;
  models::GbtParams gbt;
};

struct Diagnostics {
  std::vector<int> selected;
  int ps_clamped = 0;
  bool ps_separation = false;
  Eigen::VectorXd ps_quantiles_treated;  // 5%, 25%, 50%, 75%, 95%
  Eigen::VectorXd ps_quantiles_control;
};

struct Output {
  std::vector<core::AteEstimate> rows;
  Diagnostics diag;
};

inline bool wants(const Settings& s, core::Method m) {
  return std::find(s.methods.begin(), s.methods.end(), m) != s.methods.end();
}

namespace detail {

// point estimates for the resampling-refit recipe: every requested
// (kind, plug-in method) cell, in a fixed order
inline std::vector<std::pair<core::ModelKind, core::Method>> boot_cells(
    const Settings& s) {
  std::vector<std::pair<core::ModelKind, core::Method>> cells;
  static constexpr core::Method plugins[] = {
      core::Method::imp, core::Method::iptw, core::Method::aiptw,
      core::Method::tmle};
  for (const auto kind : s.kinds)
    for (const auto m : plugins)
      if (wants(s, m)) cells.emplace_back(kind, m);
  return cells;
}

inline Eigen::VectorXd eval_cells(
    const core::CausalDataset& d, const Settings& s,
    const std::vector<std::pair<core::ModelKind, core::Method>>& cells,
    std::uint64_t seed) {
  models::LassoOptions lo;
  lo.folds = s.lasso_folds;
  lo.seed = rng::key(seed, 0x5E1ull);
  const auto selected = models::select_union_by_arm(d, lo);

  Eigen::VectorXd out(static_cast<Eigen::Index>(cells.size()));
  core::ModelKind current = core::ModelKind::glm;
  core::NuisanceEstimates nu;
  bool have = false;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [kind, method] = cells[c];
    if (!have || kind != current) {
      models::NuisanceOptions no;
      no.kind = kind;
      no.selected = selected;
      no.seed = rng::key(seed, 0x2Full, static_cast<std::uint64_t>(kind));
      no.sl_folds = s.sl_folds;
      no.gbt = s.gbt;
      nu = models::fit_nuisances(d, no);
      current = kind;
      have = true;
    }
    double point = 0.0;
    switch (method) {
      case core::Method::imp:
        point = estimators::estimate_imp(d, nu).point;
        break;
      case core::Method::iptw:
        point = estimators::estimate_iptw(d, nu).point;
        break;
      case core::Method::aiptw:
        point = estimators::estimate_aiptw(d, nu).point;
        break;
      case core::Method::tmle:
        point = estimators::estimate_tmle(d, nu, s.tmle).est.point;
        break;
      default:
        break;
    }
    out[static_cast<Eigen::Index>(c)] = point;
  }
  return out;
}

}  // namespace detail

// Full estimation pass over one dataset: lasso selection, nuisances per
// model kind, every requested estimator, and every interval variant the
// configuration supports.
inline Output run(const core::CausalDataset& d, const Settings& s) {
  Output out;

  models::LassoOptions lo;
  lo.folds = s.lasso_folds;
  lo.seed = rng::key(s.seed, 0x5E1ull);
  out.diag.selected = models::select_union_by_arm(d, lo);

  const auto cells = detail::boot_cells(s);
  std::vector<inference::Interval> boot_iv;
  if (s.boot >= 2 && !cells.empty()) {
    inference::IntervalSpec spec{s.boot, s.level, rng::key(s.seed, 0xB001ull)};
    const auto recipe = [&](const core::CausalDataset& res,
                            std::uint64_t seed_b) {
      return detail::eval_cells(res, s, cells, seed_b);
    };
    const auto summary = inference::bootstrap_many(
        d, recipe, static_cast<Eigen::Index>(cells.size()), spec);
    boot_iv = summary.intervals;
  }

  bool first_kind = true;
  for (const auto kind : s.kinds) {
    models::NuisanceOptions no;
    no.kind = kind;
    no.selected = out.diag.selected;
    no.seed = rng::key(s.seed, 0x2Full, static_cast<std::uint64_t>(kind));
    no.sl_folds = s.sl_folds;
    no.gbt = s.gbt;
    const auto nu = models::fit_nuisances(d, no);

    if (first_kind) {
      out.diag.ps_clamped = nu.clamped;
      out.diag.ps_separation = nu.ps_separation;
      std::vector<double> et, ec;
      for (Eigen::Index i = 0; i < d.n(); ++i)
        (d.a[i] == 1.0 ? et : ec).push_back(nu.e_hat[i]);
      const double probs[] = {0.05, 0.25, 0.5, 0.75, 0.95};
      out.diag.ps_quantiles_treated.resize(5);
      out.diag.ps_quantiles_control.resize(5);
      for (int q = 0; q < 5; ++q) {
        out.diag.ps_quantiles_treated[q] = stats::quantile(et, probs[q]);
        out.diag.ps_quantiles_control[q] = stats::quantile(ec, probs[q]);
      }
      first_kind = false;
    }

    auto with_interval = [&](core::AteEstimate e, core::VarianceSource v,
                             const inference::Interval& iv) {
      e.variance = v;
      e.se = iv.se;
      e.ci_lo = iv.lo;
      e.ci_hi = iv.hi;
      e.level = s.level;
      return e;
    };
    auto boot_interval_of = [&](core::Method m) -> const inference::Interval* {
      if (boot_iv.empty()) return nullptr;
      for (std::size_t c = 0; c < cells.size(); ++c)
        if (cells[c].first == kind && cells[c].second == m)
          return &boot_iv[c];
      return nullptr;
    };

    if (wants(s, core::Method::imp)) {
      auto e = estimators::estimate_imp(d, nu);
      e.level = s.level;
      if (const auto* iv = boot_interval_of(core::Method::imp))
        e = with_interval(e, core::VarianceSource::bootstrap, *iv);
      out.rows.push_back(e);
    }
    if (wants(s, core::Method::iptw)) {
      auto e = estimators::estimate_iptw(d, nu);
      e.level = s.level;
      if (const auto* iv = boot_interval_of(core::Method::iptw))
        e = with_interval(e, core::VarianceSource::bootstrap, *iv);
      out.rows.push_back(e);
    }
    if (wants(s, core::Method::aiptw)) {
      const auto e = estimators::estimate_aiptw(d, nu);
      out.rows.push_back(with_interval(
          e, core::VarianceSource::analytic,
          inference::aiptw_ic_variance(d, nu, e.point, s.level)));
      if (const auto* iv = boot_interval_of(core::Method::aiptw))
        out.rows.push_back(
            with_interval(e, core::VarianceSource::bootstrap, *iv));
    }
    if (wants(s, core::Method::tmle)) {
      const auto fit = estimators::estimate_tmle(d, nu, s.tmle);
      out.rows.push_back(
          with_interval(fit.est, core::VarianceSource::analytic,
                        inference::tmle_ic_variance(d, nu, fit, s.level)));
      if (const auto* iv = boot_interval_of(core::Method::tmle))
        out.rows.push_back(
            with_interval(fit.est, core::VarianceSource::bootstrap, *iv));
    }
    if (wants(s, core::Method::dsm)) {
      const auto res = estimators::estimate_dsm(d, nu, s.dsm_m);
      if (s.boot >= 2) {
        inference::IntervalSpec spec{s.boot, s.level,
                                     rng::key(s.seed, 0x37Dull)};
        out.rows.push_back(
            with_interval(res.est, core::VarianceSource::wild_bootstrap,
                          inference::dsm_wild_bootstrap(d, res, spec)));
      } else {
        auto e = res.est;
        e.level = s.level;
        out.rows.push_back(e);
      }
    }
    if (wants(s, core::Method::pencomp)) {
      estimators::PencompConfig pc;
      pc.boot = s.boot;
      pc.level = s.level;
      pc.seed = rng::key(s.seed, 0xFE2ull, static_cast<std::uint64_t>(kind));
      pc.sl_folds = s.sl_folds;
      pc.gbt = s.gbt;
      out.rows.push_back(
          estimators::estimate_pencomp(d, kind, out.diag.selected, pc).est);
    }
  }
  return out;
}

}  // namespace drate::pipeline
