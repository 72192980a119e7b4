#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "drate/core.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

// Simulation designs: nine iid N(0,1) covariates X feed nonlinear confounders
// W, which drive both treatment assignment and outcomes. Estimators only ever
// see X; W, the potential outcomes and the true propensity stay on the truth
// side for diagnostics and oracles.
namespace drate::sim {

enum class Overlap { large, small };
enum class Effect { homo, hetero };
enum class WMoments { sample, population };

struct ScenarioSpec {
  Overlap overlap = Overlap::large;
  Effect effect = Effect::homo;
  double tau = 0.0;
  int n = 2000;
  WMoments moments = WMoments::sample;
};

inline std::string tag(const ScenarioSpec& s) {
  std::string t = (s.effect == Effect::homo) ? "homo-" : "hetero-";
  t += (s.overlap == Overlap::large) ? "large" : "small";
  return t;
}

inline ScenarioSpec parse_scenario(const std::string& t) {
  ScenarioSpec s;
  if (t == "homo-large") {
    s.effect = Effect::homo;
    s.overlap = Overlap::large;
  } else if (t == "homo-small") {
    s.effect = Effect::homo;
    s.overlap = Overlap::small;
  } else if (t == "hetero-large") {
    s.effect = Effect::hetero;
    s.overlap = Overlap::large;
  } else if (t == "hetero-small") {
    s.effect = Effect::hetero;
    s.overlap = Overlap::small;
  } else {
    throw core::ConfigError("unknown scenario '" + t +
                            "' (want homo-large, homo-small, hetero-large, "
                            "hetero-small)");
  }
  return s;
}

inline constexpr int kNumCovariates = 9;

// raw confounder transforms, one unit
inline std::array<double, kNumCovariates> w_raw(const double* x) {
  return {std::exp(x[0] / 2.0),
          std::exp(x[1] / 3.0),
          x[2] * x[2],
          x[3] * x[3],
          x[4],
          x[5],
          x[6] + x[7],
          x[6] * x[6] + x[7] * x[7],
          x[8] * x[8] * x[8]};
}

// population mean/sd of each raw W_j (for the population-moment mode)
inline const std::array<double, kNumCovariates>& w_pop_mean() {
  static const std::array<double, kNumCovariates> m = {
      std::exp(1.0 / 8.0), std::exp(1.0 / 18.0), 1.0, 1.0, 0.0,
      0.0,                 0.0,                  2.0, 0.0};
  return m;
}
inline const std::array<double, kNumCovariates>& w_pop_sd() {
  static const std::array<double, kNumCovariates> s = {
      std::sqrt(std::exp(0.5) - std::exp(0.25)),
      std::sqrt(std::exp(2.0 / 9.0) - std::exp(1.0 / 9.0)),
      std::sqrt(2.0),
      std::sqrt(2.0),
      1.0,
      1.0,
      std::sqrt(2.0),
      2.0,
      std::sqrt(15.0)};
  return s;
}

inline double linear_predictor(Overlap overlap, const double* w) {
  if (overlap == Overlap::large)
    return (-3.0 - w[0] + 2.0 * w[1] - 3.0 * w[2] + 3.0 * w[3] + 2.0 * w[4] +
            w[5]) /
           15.0;
  return (-8.0 * w[0] + 1.5 * w[1] + 0.5 * w[2] - 0.5 * w[3] + 2.5 * w[4] -
          0.5 * w[5]) /
         5.0;
}

inline double outcome_base(const double* w) {
  return -2.0 + 1.5 * w[0] - 2.0 * w[1] + 1.5 * w[2] + 2.5 * w[6] - w[7] + w[8];
}

inline double effect_shift(Effect effect, double tau, const double* w) {
  if (effect == Effect::homo) return tau;
  return tau + 5.0 * w[0] + 3.0 * w[2] + 2.0 * w[0] * w[2];
}

struct ScenarioDraw {
  core::CausalDataset data;  // what estimators see: X, A, Y
  Eigen::MatrixXd w;         // standardized confounders
  Eigen::VectorXd y0, y1;    // potential outcomes
  Eigen::VectorXd e;         // true propensity
  Eigen::VectorXd lp;        // true linear predictor
};

// One simulated dataset. Draw order is fixed (X row-wise, then treatment
// uniforms, then outcome noise) so a seed pins the draw bit-for-bit.
inline ScenarioDraw gen_dataset(const ScenarioSpec& spec, std::uint64_t seed) {
  const int n = spec.n;
  if (n < 2) throw core::ConfigError("scenario n must be at least 2");
  rng::Stream rs(rng::key(seed, 0xD6E1ull));

  Eigen::MatrixXd x(n, kNumCovariates);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < kNumCovariates; ++j) x(i, j) = rs.normal();

  Eigen::MatrixXd w(n, kNumCovariates);
  for (int i = 0; i < n; ++i) {
    double xi[kNumCovariates];
    for (int j = 0; j < kNumCovariates; ++j) xi[j] = x(i, j);
    const auto wi = w_raw(xi);
    for (int j = 0; j < kNumCovariates; ++j)
      w(i, j) = wi[static_cast<std::size_t>(j)];
  }
  // standardize W: sample moments by default, population constants on request
  for (int j = 0; j < kNumCovariates; ++j) {
    double mu, sigma;
    if (spec.moments == WMoments::sample) {
      mu = stats::mean(w.col(j));
      sigma = std::sqrt(stats::variance(w.col(j)));
    } else {
      mu = w_pop_mean()[static_cast<std::size_t>(j)];
      sigma = w_pop_sd()[static_cast<std::size_t>(j)];
    }
    w.col(j) = (w.col(j).array() - mu) / sigma;
  }

  Eigen::VectorXd lp(n), e(n), a(n);
  for (int i = 0; i < n; ++i) {
    double wi[kNumCovariates];
    for (int j = 0; j < kNumCovariates; ++j) wi[j] = w(i, j);
    lp[i] = linear_predictor(spec.overlap, wi);
    e[i] = stats::expit(lp[i]);
  }
  for (int i = 0; i < n; ++i) a[i] = rs.u01() < e[i] ? 1.0 : 0.0;

  Eigen::VectorXd y0(n), y1(n), y(n);
  for (int i = 0; i < n; ++i) {
    double wi[kNumCovariates];
    for (int j = 0; j < kNumCovariates; ++j) wi[j] = w(i, j);
    const double eps = rs.normal();
    y0[i] = outcome_base(wi) + eps;
    y1[i] = y0[i] + effect_shift(spec.effect, spec.tau, wi);
    y[i] = a[i] == 1.0 ? y1[i] : y0[i];
  }

  // a degenerate arm is astronomically unlikely at the design sizes, but the
  // validated constructor is the only door; re-draw treatment if it happens
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double s = a.sum();
    if (s > 0.5 && s < n - 0.5) break;
    for (int i = 0; i < n; ++i) a[i] = rs.u01() < e[i] ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i) y[i] = a[i] == 1.0 ? y1[i] : y0[i];
  }

  ScenarioDraw d{core::validate_dataset(std::move(x), std::move(a),
                                        std::move(y)),
                 std::move(w), std::move(y0), std::move(y1), std::move(e),
                 std::move(lp)};
  return d;
}

struct OracleResult {
  double value = 0.0;
  double mc_se = 0.0;
  std::uint64_t draws = 0;
};

// Monte Carlo truth for E{Y(1) - Y(0)} under a scenario: average of the
// effect shift over `draws` units, with W standardized across the oracle
// sample itself (two passes over regenerated draws keep memory flat).
inline OracleResult true_ate_oracle(const ScenarioSpec& spec,
                                    std::uint64_t draws, std::uint64_t seed) {
  if (spec.effect == Effect::homo) return {spec.tau, 0.0, draws};

  std::array<double, kNumCovariates> mu{}, sigma{};
  if (spec.moments == WMoments::sample) {
    std::array<double, kNumCovariates> s1{}, s2{};
    rng::Stream rs(rng::key(seed, 0x04AC1Eull));
    for (std::uint64_t i = 0; i < draws; ++i) {
      double xr[kNumCovariates];
      for (auto& v : xr) v = rs.normal();
      const auto wi = w_raw(xr);
      for (int j = 0; j < kNumCovariates; ++j) {
        s1[static_cast<std::size_t>(j)] += wi[static_cast<std::size_t>(j)];
        s2[static_cast<std::size_t>(j)] +=
            wi[static_cast<std::size_t>(j)] * wi[static_cast<std::size_t>(j)];
      }
    }
    const double dn = static_cast<double>(draws);
    for (int j = 0; j < kNumCovariates; ++j) {
      const auto k = static_cast<std::size_t>(j);
      mu[k] = s1[k] / dn;
      sigma[k] = std::sqrt((s2[k] - dn * mu[k] * mu[k]) / (dn - 1.0));
    }
  } else {
    mu = w_pop_mean();
    sigma = w_pop_sd();
  }

  rng::Stream rs(rng::key(seed, 0x04AC1Eull));  // same stream -> same draws
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    double xr[kNumCovariates];
    for (auto& v : xr) v = rs.normal();
    auto wi = w_raw(xr);
    for (int j = 0; j < kNumCovariates; ++j) {
      const auto k = static_cast<std::size_t>(j);
      wi[k] = (wi[k] - mu[k]) / sigma[k];
    }
    const double d = effect_shift(spec.effect, spec.tau, wi.data());
    sum += d;
    sumsq += d * d;
  }
  const double dn = static_cast<double>(draws);
  const double m = sum / dn;
  const double var = (sumsq - dn * m * m) / (dn - 1.0);
  return {m, std::sqrt(var / dn), draws};
}

}  // namespace drate::sim
