#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "drate/core.hpp"
#include "drate/inference.hpp"
#include "drate/models/gam.hpp"
#include "drate/models/logistic.hpp"
#include "drate/models/nuisance.hpp"
#include "drate/models/spline.hpp"
#include "drate/models/superlearner.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

namespace drate::estimators {

struct PencompConfig {
  int boot = 500;   // bootstrap samples feeding Rubin's rules
  int knots = 10;   // interior quantile knots on logit(e)
  double level = 0.95;
  std::uint64_t seed = 0;
  double max_drop_fraction = 0.10;
  int sl_folds = 10;
  models::GbtParams gbt;
};

struct PencompResult {
  core::AteEstimate est;
  int dropped = 0;
  double df = std::numeric_limits<double>::infinity();
};

namespace detail {

// penalized truncated-linear spline of y on (logit(e), extra covariates);
// ridge on the truncated block only, lambda by GCV
struct PsplineFit {
  Eigen::VectorXd beta;
  std::vector<double> knots;
  double sigma = 0.0;

  Eigen::MatrixXd design(const Eigen::VectorXd& t,
                         const Eigen::MatrixXd& xsel) const {
    const Eigen::Index n = t.size();
    const auto k = static_cast<Eigen::Index>(knots.size());
    Eigen::MatrixXd d(n, 2 + xsel.cols() + k);
    d.col(0).setOnes();
    d.col(1) = t;
    if (xsel.cols() > 0) d.middleCols(2, xsel.cols()) = xsel;
    if (k > 0)
      d.rightCols(k) = models::truncated_linear(t, knots);
    return d;
  }

  Eigen::VectorXd predict(const Eigen::VectorXd& t,
                          const Eigen::MatrixXd& xsel) const {
    return design(t, xsel) * beta;
  }
};

inline PsplineFit fit_pspline(const Eigen::VectorXd& t,
                              const Eigen::MatrixXd& xsel,
                              const Eigen::VectorXd& y, int knots) {
  PsplineFit f;
  f.knots = models::interior_knots(t, knots);
  const Eigen::MatrixXd d = f.design(t, xsel);
  const auto cols = d.cols();
  Eigen::VectorXd penalty = Eigen::VectorXd::Zero(cols);
  penalty.tail(static_cast<Eigen::Index>(f.knots.size())).setOnes();
  const Eigen::MatrixXd xtx = d.transpose() * d;
  const Eigen::VectorXd xty = d.transpose() * y;
  models::GamOptions opt;  // same grid/geometry as the additive models
  const auto scan = models::detail::gcv_ridge(
      xtx, xty, y.squaredNorm(), static_cast<double>(y.size()), penalty, opt);
  f.beta = scan.beta;
  if (!f.beta.allFinite())
    throw core::RankDeficientError("pencomp: spline fit failed");
  const double denom =
      std::max(1.0, static_cast<double>(y.size()) - scan.edf);
  f.sigma = std::sqrt(std::max(0.0, scan.rss) / denom);
  return f;
}

}  // namespace detail

// PENCOMP: bootstrap the sample by arm; within each bootstrap refit the
// propensity, model each arm's outcome as a penalized spline on logit(e)
// plus the selected covariates, impute every unit's missing potential
// outcome with residual noise, and combine the completed-data contrasts
// across bootstraps by Rubin's rules.
inline PencompResult estimate_pencomp(const core::CausalDataset& d,
                                      core::ModelKind kind,
                                      const std::vector<int>& selected,
                                      const PencompConfig& cfg = {}) {
  if (cfg.boot < 2) throw core::ConfigError("pencomp: need B >= 2");
  if (cfg.knots < 3) throw core::ConfigError("pencomp: need >= 3 knots");
  const Eigen::Index n = d.n();

  const Eigen::MatrixXd xsel_full = models::detail::take_cols(d.x, selected);

  std::vector<double> points, withins;
  points.reserve(static_cast<std::size_t>(cfg.boot));
  withins.reserve(static_cast<std::size_t>(cfg.boot));
  int dropped = 0;

  for (int b = 0; b < cfg.boot; ++b) {
    const std::uint64_t sb =
        rng::key(cfg.seed, 0xFE2ull, static_cast<std::uint64_t>(b));
    try {
      const auto boot =
          inference::stratified_resample(d, rng::key(sb, 0x5A3ull));

      // propensity refit on the bootstrap sample
      Eigen::VectorXd e_boot(boot.n()), e_orig(n);
      switch (kind) {
        case core::ModelKind::glm: {
          const auto ps = models::fit_logit(boot.x, boot.a);
          e_boot = ps.predict_proba(boot.x);
          e_orig = ps.predict_proba(d.x);
          break;
        }
        case core::ModelKind::gam: {
          const auto ps =
              models::fit_gam(boot.x, boot.a, models::Family::binomial);
          e_boot = ps.predict(boot.x);
          e_orig = ps.predict(d.x);
          break;
        }
        case core::ModelKind::sl: {
          models::SlOptions so;
          so.folds = cfg.sl_folds;
          so.seed = rng::key(sb, 0xE0ull);
          so.gbt = cfg.gbt;
          const auto ps = models::fit_superlearner(
              boot.x, boot.a, models::Family::binomial, so, boot.ids);
          e_boot = ps.predict(boot.x);
          e_orig = ps.predict(d.x);
          break;
        }
      }
      auto to_logit = [](Eigen::VectorXd& e) {
        for (Eigen::Index i = 0; i < e.size(); ++i)
          e[i] = stats::logit(
              stats::clamp01(e[i], core::kPsClamp));
      };
      to_logit(e_boot);
      to_logit(e_orig);

      // per-arm spline on the bootstrap sample
      detail::PsplineFit fits[2];
      const Eigen::MatrixXd xsel_boot =
          models::detail::take_cols(boot.x, selected);
      for (int arm = 0; arm <= 1; ++arm) {
        const auto rows = boot.arm_rows_by_id(arm);
        Eigen::VectorXd ta(static_cast<Eigen::Index>(rows.size()));
        Eigen::VectorXd ya(ta.size());
        Eigen::MatrixXd xa(ta.size(), xsel_boot.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          ta[static_cast<Eigen::Index>(r)] = e_boot[rows[r]];
          ya[static_cast<Eigen::Index>(r)] = boot.y[rows[r]];
          xa.row(static_cast<Eigen::Index>(r)) = xsel_boot.row(rows[r]);
        }
        fits[arm] = detail::fit_pspline(ta, xa, ya, cfg.knots);
      }

      // impute the missing potential outcome for every original unit
      const Eigen::VectorXd mu1 = fits[1].predict(e_orig, xsel_full);
      const Eigen::VectorXd mu0 = fits[0].predict(e_orig, xsel_full);
      Eigen::VectorXd contrast(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::uint64_t zk =
            rng::key(sb, 0x4015Eull, d.ids[static_cast<std::size_t>(i)]);
        if (d.a[i] == 1.0) {
          const double y0 = mu0[i] + fits[0].sigma * rng::normal_at(zk);
          contrast[i] = d.y[i] - y0;
        } else {
          const double y1 = mu1[i] + fits[1].sigma * rng::normal_at(zk);
          contrast[i] = y1 - d.y[i];
        }
      }
      const double point = stats::ksum(contrast) / static_cast<double>(n);
      const double within = stats::variance(contrast) / static_cast<double>(n);
      if (!std::isfinite(point) || !std::isfinite(within))
        throw core::EstimationError("pencomp: non-finite replicate");
      points.push_back(point);
      withins.push_back(within);
    } catch (const core::ConfigError&) {
      throw;
    } catch (const std::exception&) {
      ++dropped;
    }
  }

  if (static_cast<double>(dropped) >
          cfg.max_drop_fraction * static_cast<double>(cfg.boot) ||
      points.size() < 2)
    throw core::TooManyFailuresError("pencomp: too many dropped bootstraps");

  Eigen::Map<const Eigen::VectorXd> pv(points.data(),
                                       static_cast<Eigen::Index>(points.size()));
  Eigen::Map<const Eigen::VectorXd> wv(
      withins.data(), static_cast<Eigen::Index>(withins.size()));
  const auto rr = inference::rubin_combine(pv, wv, cfg.level,
                                           static_cast<double>(n) - 2.0);

  PencompResult out;
  out.dropped = dropped;
  out.df = rr.df;
  out.est.method = core::Method::pencomp;
  out.est.model = kind;
  out.est.variance = core::VarianceSource::rubin;
  out.est.point = rr.point;
  out.est.se = rr.se;
  out.est.ci_lo = rr.lo;
  out.est.ci_hi = rr.hi;
  out.est.level = cfg.level;
  return out;
}

}  // namespace drate::estimators
