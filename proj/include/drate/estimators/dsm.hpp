#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "drate/core.hpp"
#include "drate/stats.hpp"

namespace drate::estimators {

// Matching on the double score S = (e_hat, m0_hat, m1_hat): each unit gets
// its M nearest opposite-arm neighbours in Mahalanobis distance (pooled
// covariance), distance ties broken toward the lower unit id.
struct MatchSet {
  int m = 1;
  Eigen::MatrixXd s;                        // n x 3 score matrix
  Eigen::Matrix3d cov_inv;                  // pooled inverse covariance
  std::vector<std::vector<Eigen::Index>> matches;  // per unit, M rows
  Eigen::VectorXd k_count;                  // times unit used as a match
  bool degenerate_cov = false;
};

inline MatchSet build_match_set(const core::CausalDataset& d,
                                const core::NuisanceEstimates& nu, int m = 1) {
  const Eigen::Index n = d.n();
  if (m < 1) throw core::ConfigError("dsm: M must be >= 1");
  const Eigen::Index n1 = d.n_treated(), n0 = d.n_control();
  if (std::min(n1, n0) < m)
    throw core::EstimationError("dsm: an arm is smaller than M");

  MatchSet ms;
  ms.m = m;
  ms.s.resize(n, 3);
  ms.s.col(0) = nu.e_hat;
  ms.s.col(1) = nu.m0_hat;
  ms.s.col(2) = nu.m1_hat;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::Vector3d mu = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < n; ++i) mu += ms.s.row(i).transpose();
  mu /= static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d c = ms.s.row(i).transpose() - mu;
    cov += c * c.transpose();
  }
  cov /= static_cast<double>(n - 1);
  Eigen::Matrix3d reg = cov;
  const double tr = std::max(cov.trace(), 1e-12);
  Eigen::LDLT<Eigen::Matrix3d> ldlt(reg);
  if (ldlt.info() != Eigen::Success ||
      (ldlt.vectorD().array() < 1e-10 * tr).any()) {
    ms.degenerate_cov = true;
    reg.diagonal().array() += 1e-8 * tr;
    ldlt.compute(reg);
  }
  ms.cov_inv = ldlt.solve(Eigen::Matrix3d::Identity());

  const auto treated = d.arm_rows_by_id(1);
  const auto control = d.arm_rows_by_id(0);
  ms.matches.resize(static_cast<std::size_t>(n));
  ms.k_count = Eigen::VectorXd::Zero(n);

  // candidate pools ordered by unit id; stable partial selection keeps the
  // lowest-id-on-tie rule exact
  auto match_unit = [&](Eigen::Index i,
                        const std::vector<Eigen::Index>& pool) {
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(pool.size());
    const Eigen::Vector3d si = ms.s.row(i).transpose();
    for (const Eigen::Index j : pool) {
      const Eigen::Vector3d dv = ms.s.row(j).transpose() - si;
      dist.emplace_back(dv.dot(ms.cov_inv * dv), j);
    }
    const auto mth = dist.begin() + m;
    std::partial_sort(dist.begin(), mth, dist.end(),
                      [&](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first < b.first;
                        return d.ids[static_cast<std::size_t>(a.second)] <
                               d.ids[static_cast<std::size_t>(b.second)];
                      });
    auto& mv = ms.matches[static_cast<std::size_t>(i)];
    mv.reserve(static_cast<std::size_t>(m));
    for (int q = 0; q < m; ++q) {
      mv.push_back(dist[static_cast<std::size_t>(q)].second);
      ms.k_count[dist[static_cast<std::size_t>(q)].second] += 1.0;
    }
  };
  for (const Eigen::Index i : treated) match_unit(i, control);
  for (const Eigen::Index i : control) match_unit(i, treated);
  return ms;
}

struct DsmResult {
  core::AteEstimate est;
  MatchSet match_set;
  Eigen::VectorXd psi;  // centered per-unit contributions for wild bootstrap
};

// Matching estimator with a quadratic-sieve bias correction: per arm,
// regress Y on (1, S, S^2) and subtract the counterfactual-arm regression
// discrepancy between own and matched score values.
inline DsmResult estimate_dsm(const core::CausalDataset& d,
                              const core::NuisanceEstimates& nu, int m = 1) {
  DsmResult res;
  res.match_set = build_match_set(d, nu, m);
  const MatchSet& ms = res.match_set;
  const Eigen::Index n = d.n();
  const double dm = static_cast<double>(m);

  // quadratic sieve per arm on the double score
  Eigen::MatrixXd sieve(n, 7);
  sieve.col(0).setOnes();
  sieve.middleCols(1, 3) = ms.s;
  sieve.middleCols(4, 3) = ms.s.array().square().matrix();
  Eigen::VectorXd coef[2];
  for (int arm = 0; arm <= 1; ++arm) {
    const auto rows = d.arm_rows_by_id(arm);
    Eigen::MatrixXd xa(static_cast<Eigen::Index>(rows.size()), 7);
    Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      xa.row(static_cast<Eigen::Index>(r)) = sieve.row(rows[r]);
      ya[static_cast<Eigen::Index>(r)] = d.y[rows[r]];
    }
    // rank-tolerant least squares; degenerate scores collapse gracefully
    coef[arm] = xa.colPivHouseholderQr().solve(ya);
  }
  const Eigen::VectorXd mu0 = sieve * coef[0];
  const Eigen::VectorXd mu1 = sieve * coef[1];

  Eigen::VectorXd contrib(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = 2.0 * d.a[i] - 1.0;
    const double base =
        sign * (1.0 + ms.k_count[i] / dm) * d.y[i];
    // counterfactual-arm regression, own minus matched values
    const Eigen::VectorXd& mu_cf = d.a[i] == 1.0 ? mu0 : mu1;
    double disc = 0.0;
    for (const Eigen::Index j : ms.matches[static_cast<std::size_t>(i)])
      disc += mu_cf[i] - mu_cf[j];
    contrib[i] = base - sign * disc / dm;
  }
  const double tau = stats::ksum(contrib) / static_cast<double>(n);

  res.est.method = core::Method::dsm;
  res.est.model = nu.kind;
  res.est.point = tau;
  res.psi = contrib.array() - tau;
  return res;
}

}  // namespace drate::estimators
