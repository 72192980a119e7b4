#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "drate/core.hpp"
#include "drate/models/family.hpp"
#include "drate/models/gam.hpp"
#include "drate/models/gbt.hpp"
#include "drate/models/linear.hpp"
#include "drate/models/logistic.hpp"
#include "drate/models/stepwise.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

namespace drate::models {

struct SlLibrary {
  bool glm = true;
  bool stepwise = true;
  bool gam = true;
  bool gbt = true;
};

struct SlOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  SlLibrary library;
  GbtParams gbt;
};

// Exact minimizer of ||Z w - y||^2 over the probability simplex: non-negative
// least squares with the weights summing to one, solved by enumerating
// active faces (library sizes are tiny). Guarantees the stacked CV risk never
// exceeds the best single learner (every vertex is feasible).
inline Eigen::VectorXd simplex_nnls(const Eigen::MatrixXd& z,
                                    const Eigen::VectorXd& y) {
  const int l = static_cast<int>(z.cols());
  if (l > 12) throw core::EstimationError("simplex_nnls: library too large");
  const Eigen::MatrixXd ztz = z.transpose() * z;
  const Eigen::VectorXd zty = z.transpose() * y;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_w = Eigen::VectorXd::Zero(l);
  for (unsigned mask = 1; mask < (1u << l); ++mask) {
    std::vector<int> s;
    for (int j = 0; j < l; ++j)
      if (mask & (1u << j)) s.push_back(j);
    const auto k = static_cast<Eigen::Index>(s.size());
    // KKT system for min w' ztz w - 2 w' zty s.t. 1'w = 1 on the face
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (Eigen::Index r = 0; r < k; ++r) {
      rhs[r] = zty[s[static_cast<std::size_t>(r)]];
      for (Eigen::Index c = 0; c < k; ++c)
        kkt(r, c) = ztz(s[static_cast<std::size_t>(r)],
                        s[static_cast<std::size_t>(c)]);
      kkt(r, k) = 0.5;
      kkt(k, r) = 1.0;
    }
    kkt.topLeftCorner(k, k).diagonal().array() += 1e-12;
    rhs[k] = 1.0;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    if (!sol.allFinite()) continue;
    bool feasible = true;
    for (Eigen::Index r = 0; r < k; ++r)
      if (sol[r] < -1e-10) feasible = false;
    if (!feasible) continue;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(l);
    double total = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) {
      const double v = std::max(0.0, sol[r]);
      w[s[static_cast<std::size_t>(r)]] = v;
      total += v;
    }
    if (total <= 0.0) continue;
    w /= total;  // exact re-normalization against clipping fuzz
    const double risk =
        (z * w - y).squaredNorm();
    if (risk < best - 1e-15) {
      best = risk;
      best_w = w;
    }
  }
  if (!(best < std::numeric_limits<double>::infinity()))
    throw core::EstimationError("simplex_nnls: no feasible face");
  return best_w;
}

struct StackedModel {
  struct Member {
    std::string name;
    std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> predict;
    double cv_risk = std::numeric_limits<double>::quiet_NaN();
    double weight = 0.0;
  };
  std::vector<Member> members;
  Family family = Family::gaussian;
  double stack_cv_risk = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> dropped;  // learners that failed to fit

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.rows());
    for (const auto& mem : members)
      if (mem.weight > 0.0) out += mem.weight * mem.predict(x);
    return out;
  }
};

namespace detail {

struct LearnerSpec {
  std::string name;
  // fit on (x, y); returns a predictor on the response scale
  std::function<std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>(
      const Eigen::MatrixXd&, const Eigen::VectorXd&,
      const std::vector<std::uint64_t>&, std::uint64_t)>
      fit;
};

inline std::vector<LearnerSpec> library_specs(Family family,
                                              const SlOptions& opt) {
  std::vector<LearnerSpec> specs;
  if (opt.library.glm) {
    specs.push_back(
        {"glm", [family](const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const std::vector<std::uint64_t>&, std::uint64_t) {
           if (family == Family::gaussian) {
             auto m = fit_ols(x, y);
             return std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>(
                 [m](const Eigen::MatrixXd& q) { return m.predict(q); });
           }
           auto m = fit_logit(x, y);
           return std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>(
               [m](const Eigen::MatrixXd& q) { return m.predict_proba(q); });
         }});
  }
  if (opt.library.stepwise) {
    specs.push_back(
        {"stepwise",
         [family](const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const std::vector<std::uint64_t>&, std::uint64_t) {
           auto m = fit_stepwise(x, y, family, 15);
           return std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>(
               [m](const Eigen::MatrixXd& q) { return m.predict(q); });
         }});
  }
  if (opt.library.gam) {
    specs.push_back(
        {"gam", [family](const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const std::vector<std::uint64_t>&, std::uint64_t) {
           auto m = fit_gam(x, y, family);
           return std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>(
               [m](const Eigen::MatrixXd& q) { return m.predict(q); });
         }});
  }
  if (opt.library.gbt) {
    const GbtParams base = opt.gbt;
    specs.push_back(
        {"gbt", [family, base](const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& y,
                               const std::vector<std::uint64_t>& keys,
                               std::uint64_t seed) {
           GbtParams prm = base;
           prm.seed = seed;
           auto m = fit_gbt(x, y, family, prm, keys);
           return std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>(
               [m](const Eigen::MatrixXd& q) { return m.predict(q); });
         }});
  }
  return specs;
}

}  // namespace detail

inline StackedModel fit_superlearner(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Family family,
    const SlOptions& opt = {},
    const std::vector<std::uint64_t>& row_keys = {}) {
  const Eigen::Index n = y.size();
  if (x.rows() != n) throw core::DataError("superlearner: row count mismatch");
  if (n < 5 * opt.folds)
    throw core::ConfigError("superlearner: need n >= 5 V");

  std::vector<std::uint64_t> keys = row_keys;
  if (keys.empty()) {
    keys.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      keys[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
  }
  const auto fold =
      rng::fold_assignment(rng::key(opt.seed, 0x5Eull), keys, opt.folds);
  auto specs = detail::library_specs(family, opt);
  if (specs.empty())
    throw core::DegenerateLibraryError("superlearner: empty library");

  StackedModel sm;
  sm.family = family;

  // cross-validated predictions, column per surviving learner
  std::vector<Eigen::VectorXd> z_cols;
  std::vector<std::string> names;
  std::vector<std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>>
      full_fits;
  for (std::size_t li = 0; li < specs.size(); ++li) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    bool ok = true;
    try {
      for (int v = 0; v < opt.folds && ok; ++v) {
        std::vector<Eigen::Index> tr, va;
        for (Eigen::Index i = 0; i < n; ++i)
          (fold[static_cast<std::size_t>(i)] == v ? va : tr).push_back(i);
        Eigen::MatrixXd xt(static_cast<Eigen::Index>(tr.size()), x.cols());
        Eigen::VectorXd yt(static_cast<Eigen::Index>(tr.size()));
        std::vector<std::uint64_t> kt(tr.size());
        for (std::size_t r = 0; r < tr.size(); ++r) {
          xt.row(static_cast<Eigen::Index>(r)) = x.row(tr[r]);
          yt[static_cast<Eigen::Index>(r)] = y[tr[r]];
          kt[r] = keys[static_cast<std::size_t>(tr[r])];
        }
        auto fitted = specs[li].fit(
            xt, yt, kt,
            rng::key(opt.seed, 0x6B7ull, static_cast<std::uint64_t>(li),
                     static_cast<std::uint64_t>(v)));
        Eigen::MatrixXd xv(static_cast<Eigen::Index>(va.size()), x.cols());
        for (std::size_t r = 0; r < va.size(); ++r)
          xv.row(static_cast<Eigen::Index>(r)) = x.row(va[r]);
        const Eigen::VectorXd pv = fitted(xv);
        for (std::size_t r = 0; r < va.size(); ++r)
          z[va[r]] = pv[static_cast<Eigen::Index>(r)];
      }
      auto full = specs[li].fit(
          x, y, keys,
          rng::key(opt.seed, 0x6B7ull, static_cast<std::uint64_t>(li),
                   0xFFFFull));
      if (!z.allFinite()) ok = false;
      if (ok) {
        z_cols.push_back(std::move(z));
        names.push_back(specs[li].name);
        full_fits.push_back(std::move(full));
      }
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) sm.dropped.push_back(specs[li].name);
  }
  if (z_cols.empty())
    throw core::DegenerateLibraryError(
        "superlearner: every library member failed");

  const auto l = static_cast<Eigen::Index>(z_cols.size());
  Eigen::MatrixXd z(n, l);
  for (Eigen::Index c = 0; c < l; ++c) z.col(c) = z_cols[static_cast<std::size_t>(c)];
  const Eigen::VectorXd w = simplex_nnls(z, y);

  const double dn = static_cast<double>(n);
  for (Eigen::Index c = 0; c < l; ++c) {
    StackedModel::Member mem;
    mem.name = names[static_cast<std::size_t>(c)];
    mem.predict = full_fits[static_cast<std::size_t>(c)];
    mem.cv_risk = (z.col(c) - y).squaredNorm() / dn;
    mem.weight = w[c];
    sm.members.push_back(std::move(mem));
  }
  sm.stack_cv_risk = (z * w - y).squaredNorm() / dn;
  return sm;
}

}  // namespace drate::models
