#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace drate::stats {

// Neumaier compensated summation; keeps reductions stable enough that row
// permutations reproduce estimates to ~1e-13 relative.
inline double ksum(const double* x, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = s + x[i];
    if (std::abs(s) >= std::abs(x[i]))
      c += (s - t) + x[i];
    else
      c += (x[i] - t) + s;
    s = t;
  }
  return s + c;
}

inline double ksum(const Eigen::VectorXd& x) {
  return ksum(x.data(), static_cast<std::size_t>(x.size()));
}

inline double ksum(const std::vector<double>& x) {
  return ksum(x.data(), x.size());
}

inline double mean(const Eigen::VectorXd& x) {
  return ksum(x) / static_cast<double>(x.size());
}

// unbiased (n-1) variance
inline double variance(const Eigen::VectorXd& x) {
  const auto n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(x);
  Eigen::VectorXd d = (x.array() - m).square();
  return ksum(d) / static_cast<double>(n - 1);
}

inline double variance(const std::vector<double>& x) {
  return variance(Eigen::Map<const Eigen::VectorXd>(
      x.data(), static_cast<Eigen::Index>(x.size())));
}

inline double sd(const Eigen::VectorXd& x) { return std::sqrt(variance(x)); }

// type-7 (linear interpolation) sample quantile, matching the usual default
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (p <= 0.0) return *std::min_element(v.begin(), v.end());
  if (p >= 1.0) return *std::max_element(v.begin(), v.end());
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

inline double quantile(const Eigen::VectorXd& x, double p) {
  return quantile(std::vector<double>(x.data(), x.data() + x.size()), p);
}

inline double expit(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double clamp01(double p, double eps) {
  return std::min(1.0 - eps, std::max(eps, p));
}

}  // namespace drate::stats
