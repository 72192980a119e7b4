#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "drate/core.hpp"
#include "drate/estimators/ate.hpp"
#include "drate/estimators/dsm.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

namespace drate::inference {

struct IntervalSpec {
  int b = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

struct Interval {
  double se = std::numeric_limits<double>::quiet_NaN();
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
};

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}
inline double t_quantile(double p, double df) {
  if (!std::isfinite(df) || df > 1e8) return normal_quantile(p);
  return boost::math::quantile(
      boost::math::students_t_distribution<double>(df), p);
}

// Stratified nonparametric resample: arm sizes preserved, draws taken from
// the arm pools ordered by unit id (so the resample is a function of the
// unit multiset, not the row order). The resample gets fresh ids.
inline core::CausalDataset stratified_resample(const core::CausalDataset& d,
                                               std::uint64_t seed) {
  rng::Stream rs(seed);
  const Eigen::Index n = d.n();
  Eigen::MatrixXd x(n, d.p());
  Eigen::VectorXd a(n), y(n);
  Eigen::Index at = 0;
  for (int arm = 1; arm >= 0; --arm) {
    const auto pool = d.arm_rows_by_id(arm);
    const auto sz = static_cast<std::uint64_t>(pool.size());
    for (std::uint64_t k = 0; k < sz; ++k) {
      const Eigen::Index src = pool[static_cast<std::size_t>(rs.below(sz))];
      x.row(at) = d.x.row(src);
      a[at] = d.a[src];
      y[at] = d.y[src];
      ++at;
    }
  }
  return core::validate_dataset(std::move(x), std::move(a), std::move(y),
                                d.covariate_names);
}

struct BootstrapSummary {
  Eigen::MatrixXd draws;        // kept_b x k
  std::vector<Interval> intervals;
  int requested = 0;
  int failed = 0;
};

// Percentile bootstrap over a multi-statistic recipe. The recipe re-derives
// everything (selection, nuisances, estimates) from the resample and the
// per-resample seed; failures are dropped, more than 10% failing is an error.
inline BootstrapSummary bootstrap_many(
    const core::CausalDataset& d,
    const std::function<Eigen::VectorXd(const core::CausalDataset&,
                                        std::uint64_t)>& recipe,
    Eigen::Index k, const IntervalSpec& spec) {
  if (spec.b < 2) throw core::ConfigError("bootstrap: need B >= 2");
  BootstrapSummary out;
  out.requested = spec.b;
  std::vector<Eigen::VectorXd> kept;
  kept.reserve(static_cast<std::size_t>(spec.b));
  for (int b = 0; b < spec.b; ++b) {
    const std::uint64_t sb = rng::key(spec.seed, 0xB007ull,
                                      static_cast<std::uint64_t>(b));
    try {
      const auto res = stratified_resample(d, rng::key(sb, 0x5A3ull));
      Eigen::VectorXd stat = recipe(res, sb);
      if (stat.size() != k || !stat.allFinite()) throw core::EstimationError(
          "bootstrap: bad replicate statistic");
      kept.push_back(std::move(stat));
    } catch (const core::ConfigError&) {
      throw;  // configuration problems are not sampling noise
    } catch (const std::exception&) {
      ++out.failed;
    }
  }
  if (kept.size() < static_cast<std::size_t>(spec.b) -
                        static_cast<std::size_t>(spec.b) / 10 ||
      kept.size() < 2)
    throw core::TooManyFailuresError("bootstrap: too many failed resamples");

  out.draws.resize(static_cast<Eigen::Index>(kept.size()), k);
  for (std::size_t r = 0; r < kept.size(); ++r)
    out.draws.row(static_cast<Eigen::Index>(r)) = kept[r].transpose();
  const double alpha = 1.0 - spec.level;
  out.intervals.resize(static_cast<std::size_t>(k));
  for (Eigen::Index c = 0; c < k; ++c) {
    Interval iv;
    iv.se = stats::sd(out.draws.col(c));
    iv.lo = stats::quantile(out.draws.col(c), alpha / 2.0);
    iv.hi = stats::quantile(out.draws.col(c), 1.0 - alpha / 2.0);
    out.intervals[static_cast<std::size_t>(c)] = iv;
  }
  return out;
}

inline Interval bootstrap_ci(
    const core::CausalDataset& d,
    const std::function<double(const core::CausalDataset&, std::uint64_t)>&
        recipe,
    const IntervalSpec& spec) {
  auto wrapped = [&recipe](const core::CausalDataset& dd, std::uint64_t s) {
    Eigen::VectorXd v(1);
    v[0] = recipe(dd, s);
    return v;
  };
  return bootstrap_many(d, wrapped, 1, spec).intervals[0];
}

// influence-curve (sandwich) interval for AIPTW
inline Interval aiptw_ic_variance(const core::CausalDataset& d,
                                  const core::NuisanceEstimates& nu,
                                  double point, double level = 0.95) {
  const Eigen::Index n = d.n();
  Eigen::VectorXd phi2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi = estimators::aiptw_contribution(
                           d.a[i], d.y[i], nu.e_hat[i], nu.m1_hat[i],
                           nu.m0_hat[i]) -
                       point;
    phi2[i] = phi * phi;
  }
  Interval iv;
  iv.se = std::sqrt(stats::ksum(phi2)) / static_cast<double>(n);
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  iv.lo = point - z * iv.se;
  iv.hi = point + z * iv.se;
  return iv;
}

// influence-curve interval for TMLE on the targeted fit
inline Interval tmle_ic_variance(const core::CausalDataset& d,
                                 const core::NuisanceEstimates& nu,
                                 const estimators::TmleFit& fit,
                                 double level = 0.95) {
  const Eigen::Index n = d.n();
  const double tau = fit.est.point;
  Eigen::VectorXd phi2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi =
        d.a[i] / nu.e_hat[i] * (d.y[i] - fit.y1_star[i]) -
        (1.0 - d.a[i]) / (1.0 - nu.e_hat[i]) * (d.y[i] - fit.y0_star[i]) +
        (fit.y1_star[i] - fit.y0_star[i]) - tau;
    phi2[i] = phi * phi;
  }
  Interval iv;
  iv.se = std::sqrt(stats::ksum(phi2)) / static_cast<double>(n);
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  iv.lo = tau - z * iv.se;
  iv.hi = tau + z * iv.se;
  return iv;
}

// Rademacher wild bootstrap on the centered matching contributions
inline Interval dsm_wild_bootstrap(const core::CausalDataset& d,
                                   const estimators::DsmResult& r,
                                   const IntervalSpec& spec) {
  if (spec.b < 2) throw core::ConfigError("wild bootstrap: need B >= 2");
  const Eigen::Index n = d.n();
  std::vector<double> draws(static_cast<std::size_t>(spec.b));
  Eigen::VectorXd term(n);
  for (int b = 0; b < spec.b; ++b) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double eta = rng::rademacher_at(
          rng::key(spec.seed, 0x37Dull, static_cast<std::uint64_t>(b),
                   d.ids[static_cast<std::size_t>(i)]));
      term[i] = eta * r.psi[i];
    }
    draws[static_cast<std::size_t>(b)] =
        r.est.point + stats::ksum(term) / static_cast<double>(n);
  }
  Interval iv;
  Eigen::Map<const Eigen::VectorXd> dv(draws.data(),
                                       static_cast<Eigen::Index>(draws.size()));
  iv.se = stats::sd(dv);
  const double alpha = 1.0 - spec.level;
  iv.lo = stats::quantile(draws, alpha / 2.0);
  iv.hi = stats::quantile(draws, 1.0 - alpha / 2.0);
  return iv;
}

struct RubinResult {
  double point = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  double df = std::numeric_limits<double>::infinity();
};

// Rubin's rules with the Barnard-Rubin small-sample degrees of freedom
inline RubinResult rubin_combine(const Eigen::VectorXd& points,
                                 const Eigen::VectorXd& withins,
                                 double level = 0.95,
                                 double complete_df =
                                     std::numeric_limits<double>::infinity()) {
  const auto b = points.size();
  if (b < 2 || withins.size() != b)
    throw core::ConfigError("rubin: need at least two draws");
  RubinResult r;
  r.point = stats::mean(points);
  const double wbar = stats::mean(withins);
  const double bv = stats::variance(points);
  const double db = static_cast<double>(b);
  const double total = wbar + (1.0 + 1.0 / db) * bv;
  r.se = std::sqrt(total);
  double df = std::numeric_limits<double>::infinity();
  if (total > 0.0 && bv > 0.0) {
    const double gamma = (1.0 + 1.0 / db) * bv / total;
    const double df_old = (db - 1.0) / (gamma * gamma);
    if (std::isfinite(complete_df)) {
      const double df_obs = (complete_df + 1.0) / (complete_df + 3.0) *
                            complete_df * (1.0 - gamma);
      // gamma -> 1 sends df_obs to 0; keep the t reference usable
      df = df_obs > 0.0 ? 1.0 / (1.0 / df_old + 1.0 / df_obs) : df_old;
    } else {
      df = df_old;
    }
    df = std::max(df, 1.0);
  }
  r.df = df;
  const double q = t_quantile(1.0 - (1.0 - level) / 2.0, df);
  r.lo = r.point - q * r.se;
  r.hi = r.point + q * r.se;
  return r;
}

}  // namespace drate::inference
