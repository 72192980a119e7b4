#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "drate/core.hpp"
#include "drate/models/family.hpp"
#include "drate/models/linear.hpp"
#include "drate/models/logistic.hpp"
#include "drate/stats.hpp"

namespace drate::models {

// Forward-stepwise GLM scored by AIC, capped term count. Gaussian candidates
// are scored from the Gram matrix; binomial candidates run a short
// warm-started IRLS and the winner is refit to convergence.
struct StepwiseModel {
  Family family = Family::gaussian;
  std::vector<int> terms;  // selected column indices, in selection order
  LinearModel lin;         // gaussian fit on selected terms
  LogisticModel logi;      // binomial fit on selected terms

  Eigen::MatrixXd subset(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd s(x.rows(), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t k = 0; k < terms.size(); ++k)
      s.col(static_cast<Eigen::Index>(k)) = x.col(terms[k]);
    return s;
  }

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    const Eigen::MatrixXd s = subset(x);
    return family == Family::gaussian ? lin.predict(s)
                                      : logi.predict_proba(s);
  }
};

inline StepwiseModel fit_stepwise(const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y, Family family,
                                  int max_terms = 15) {
  const Eigen::Index n = y.size(), p = x.cols();
  if (x.rows() != n) throw core::DataError("stepwise: row count mismatch");
  max_terms = std::min<int>(max_terms, static_cast<int>(p));
  StepwiseModel m;
  m.family = family;
  const double dn = static_cast<double>(n);

  if (family == Family::gaussian) {
    // Gram pieces with an intercept column up front
    Eigen::MatrixXd g(p + 1, p + 1);
    Eigen::VectorXd gy(p + 1);
    {
      Eigen::MatrixXd d(n, p + 1);
      d.col(0).setOnes();
      d.rightCols(p) = x;
      g = d.transpose() * d;
      gy = d.transpose() * y;
    }
    const double yty = y.squaredNorm();
    auto rss_of = [&](const std::vector<int>& cols) {
      const auto k = static_cast<Eigen::Index>(cols.size()) + 1;
      Eigen::MatrixXd gs(k, k);
      Eigen::VectorXd gys(k);
      std::vector<int> idx{0};
      for (int c : cols) idx.push_back(c + 1);
      for (Eigen::Index r = 0; r < k; ++r) {
        gys[r] = gy[idx[static_cast<std::size_t>(r)]];
        for (Eigen::Index c = 0; c < k; ++c)
          gs(r, c) = g(idx[static_cast<std::size_t>(r)],
                       idx[static_cast<std::size_t>(c)]);
      }
      gs.diagonal().array() += 1e-10;
      const Eigen::VectorXd b = gs.ldlt().solve(gys);
      return std::max(1e-300, yty - b.dot(gys));
    };
    auto aic_of = [&](double rss, std::size_t k) {
      return dn * std::log(rss / dn) + 2.0 * (static_cast<double>(k) + 2.0);
    };
    double best_aic = aic_of(rss_of({}), 0);
    std::vector<int> current;
    std::vector<bool> used(static_cast<std::size_t>(p), false);
    while (static_cast<int>(current.size()) < max_terms) {
      int best_j = -1;
      double best_cand = best_aic;
      for (int j = 0; j < p; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        auto cand = current;
        cand.push_back(j);
        const double aic = aic_of(rss_of(cand), cand.size());
        if (aic < best_cand - 1e-12) {
          best_cand = aic;
          best_j = j;
        }
      }
      if (best_j < 0) break;
      current.push_back(best_j);
      used[static_cast<std::size_t>(best_j)] = true;
      best_aic = best_cand;
    }
    m.terms = current;
    m.lin = fit_ols(m.subset(x), y);
    return m;
  }

  // binomial
  auto aic_of = [&](const LogisticModel& f, std::size_t k) {
    return f.deviance + 2.0 * (static_cast<double>(k) + 1.0);
  };
  LogitOptions quick;
  quick.max_iterations = 6;
  std::vector<int> current;
  std::vector<bool> used(static_cast<std::size_t>(p), false);
  double best_aic =
      aic_of(fit_logit(Eigen::MatrixXd(n, 0), y, quick), 0);
  while (static_cast<int>(current.size()) < max_terms) {
    int best_j = -1;
    double best_cand = best_aic;
    for (int j = 0; j < p; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      auto cand = current;
      cand.push_back(j);
      Eigen::MatrixXd s(n, static_cast<Eigen::Index>(cand.size()));
      for (std::size_t k = 0; k < cand.size(); ++k)
        s.col(static_cast<Eigen::Index>(k)) = x.col(cand[k]);
      const double aic = aic_of(fit_logit(s, y, quick), cand.size());
      if (aic < best_cand - 1e-12) {
        best_cand = aic;
        best_j = j;
      }
    }
    if (best_j < 0) break;
    current.push_back(best_j);
    used[static_cast<std::size_t>(best_j)] = true;
    best_aic = best_cand;
  }
  m.terms = current;
  m.logi = fit_logit(m.subset(x), y);
  return m;
}

}  // namespace drate::models
