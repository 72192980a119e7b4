#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "drate/stats.hpp"

namespace drate::models {

// distinct quantile knots, probabilities equally spaced on [0.05, 0.95]
inline std::vector<double> quantile_knots(const Eigen::VectorXd& x, int k) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double p = 0.05 + 0.90 * static_cast<double>(i) /
                                static_cast<double>(k - 1);
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    const double q = (lo + 1 < v.size()) ? v[lo] * (1.0 - frac) + v[lo + 1] * frac
                                         : v.back();
    if (knots.empty() || q > knots.back() + 1e-12) knots.push_back(q);
  }
  return knots;
}

// interior quantile knots at j/(k+1), j = 1..k (for truncated-linear bases)
inline std::vector<double> interior_knots(const Eigen::VectorXd& x, int k) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    const double p = static_cast<double>(j) / static_cast<double>(k + 1);
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    const double q = (lo + 1 < v.size()) ? v[lo] * (1.0 - frac) + v[lo + 1] * frac
                                         : v.back();
    if (knots.empty() || q > knots.back() + 1e-12) knots.push_back(q);
  }
  return knots;
}

// Natural cubic spline curvature columns for K >= 3 knots: the usual
// truncated-power construction d_k - d_{K-1}, linear beyond the boundary
// knots. The linear term itself is NOT included here.
inline Eigen::MatrixXd ncs_curvature(const Eigen::VectorXd& x,
                                     const std::vector<double>& knots) {
  const auto big_k = knots.size();
  const Eigen::Index n = x.size();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(big_k) - 2);
  const double xi_last = knots[big_k - 1];
  const double xi_prev = knots[big_k - 2];
  auto cube_pos = [](double t) { return t > 0.0 ? t * t * t : 0.0; };
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dlast = (cube_pos(x[i] - xi_prev) - cube_pos(x[i] - xi_last)) /
                         (xi_last - xi_prev);
    for (std::size_t k = 0; k + 2 < big_k; ++k) {
      const double dk = (cube_pos(x[i] - knots[k]) - cube_pos(x[i] - xi_last)) /
                        (xi_last - knots[k]);
      out(i, static_cast<Eigen::Index>(k)) = dk - dlast;
    }
  }
  return out;
}

// (x - knot)_+ columns
inline Eigen::MatrixXd truncated_linear(const Eigen::VectorXd& x,
                                        const std::vector<double>& knots) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(knots.size()));
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t k = 0; k < knots.size(); ++k)
      out(i, static_cast<Eigen::Index>(k)) = std::max(0.0, x[i] - knots[k]);
  return out;
}

inline bool essentially_binary(const Eigen::VectorXd& x) {
  double lo = x[0], hi = x[0];
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
  }
  if (hi - lo < 1e-12) return true;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] > lo + 1e-12 && x[i] < hi - 1e-12) return false;
  return true;
}

}  // namespace drate::models
