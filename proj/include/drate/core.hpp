#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace drate::core {

// ---- error taxonomy ----
// config errors -> exit 2, data errors -> exit 3, estimation errors -> exit 4
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyArmError : DataError {
  using DataError::DataError;
};
struct NonFiniteError : DataError {
  using DataError::DataError;
};
struct NonBinaryTreatmentError : DataError {
  using DataError::DataError;
};
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficientError : EstimationError {
  using EstimationError::EstimationError;
};
struct DegenerateLibraryError : EstimationError {
  using EstimationError::EstimationError;
};
struct TooManyFailuresError : EstimationError {
  using EstimationError::EstimationError;
};

enum class ModelKind { glm, gam, sl };
enum class Method { imp, iptw, aiptw, tmle, dsm, pencomp };
enum class VarianceSource { none, analytic, bootstrap, wild_bootstrap, rubin };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::glm: return "glm";
    case ModelKind::gam: return "gam";
    case ModelKind::sl: return "sl";
  }
  return "?";
}
inline std::string to_string(Method m) {
  switch (m) {
    case Method::imp: return "imp";
    case Method::iptw: return "iptw";
    case Method::aiptw: return "aiptw";
    case Method::tmle: return "tmle";
    case Method::dsm: return "dsm";
    case Method::pencomp: return "pencomp";
  }
  return "?";
}
inline std::string to_string(VarianceSource v) {
  switch (v) {
    case VarianceSource::none: return "none";
    case VarianceSource::analytic: return "analytic";
    case VarianceSource::bootstrap: return "bootstrap";
    case VarianceSource::wild_bootstrap: return "wild_bootstrap";
    case VarianceSource::rubin: return "rubin";
  }
  return "?";
}

// Observed-data container. Treat as immutable: every consumer takes const&,
// and nothing in the library mutates a validated dataset.
struct CausalDataset {
  Eigen::MatrixXd x;                        // n x p covariates
  Eigen::VectorXd a;                        // treatment in {0,1}
  Eigen::VectorXd y;                        // outcome
  std::vector<std::string> covariate_names; // size p
  std::vector<std::uint64_t> ids;           // stable unit ids (row identity)

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return x.cols(); }

  Eigen::Index n_treated() const {
    return static_cast<Eigen::Index>(a.sum() + 0.5);
  }
  Eigen::Index n_control() const { return n() - n_treated(); }

  // rows of one arm ordered by unit id (stable under row permutation)
  std::vector<Eigen::Index> arm_rows_by_id(int arm) const {
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(n()));
    for (Eigen::Index i = 0; i < n(); ++i)
      if (static_cast<int>(a[i]) == arm) rows.push_back(i);
    std::sort(rows.begin(), rows.end(),
              [&](Eigen::Index u, Eigen::Index v) { return ids[u] < ids[v]; });
    return rows;
  }
};

inline bool operator==(const CausalDataset& lhs, const CausalDataset& rhs) {
  return lhs.x == rhs.x && lhs.a == rhs.a && lhs.y == rhs.y &&
         lhs.covariate_names == rhs.covariate_names && lhs.ids == rhs.ids;
}

// Sole constructor path for CausalDataset. Throws on malformed input;
// idempotent (validating a validated dataset's arrays returns an equal one).
inline CausalDataset validate_dataset(
    Eigen::MatrixXd x, Eigen::VectorXd a, Eigen::VectorXd y,
    std::vector<std::string> covariate_names = {}) {
  const Eigen::Index n = y.size();
  if (x.rows() != n || a.size() != n)
    throw DataError("covariates, treatment and outcome row counts differ");
  if (n < 2) throw DataError("need at least two rows");
  if (x.cols() < 1) throw DataError("need at least one covariate");
  if (!x.allFinite()) throw NonFiniteError("non-finite covariate value");
  if (!y.allFinite()) throw NonFiniteError("non-finite outcome value");
  Eigen::Index n1 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] != 0.0 && a[i] != 1.0)
      throw NonBinaryTreatmentError("treatment must be exactly 0 or 1");
    n1 += (a[i] == 1.0);
  }
  if (n1 == 0) throw EmptyArmError("no treated units");
  if (n1 == n) throw EmptyArmError("no control units");
  if (covariate_names.empty()) {
    covariate_names.resize(static_cast<std::size_t>(x.cols()));
    for (std::size_t j = 0; j < covariate_names.size(); ++j)
      covariate_names[j] = "x" + std::to_string(j + 1);
  }
  if (covariate_names.size() != static_cast<std::size_t>(x.cols()))
    throw DataError("covariate name count does not match columns");
  CausalDataset d{std::move(x), std::move(a), std::move(y),
                  std::move(covariate_names), {}};
  d.ids.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    d.ids[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
  return d;
}

// Fitted nuisance functions evaluated on the sample.
struct NuisanceEstimates {
  Eigen::VectorXd e_hat;   // propensity scores, clamped
  Eigen::VectorXd m1_hat;  // outcome regression under treatment
  Eigen::VectorXd m0_hat;  // outcome regression under control
  ModelKind kind = ModelKind::glm;
  int clamped = 0;                // units hit by the PS clamp
  bool empty_selection = false;   // outcome models were intercept-only
  bool ps_separation = false;     // PS fit flagged quasi-separation
};

inline constexpr double kPsClamp = 0.01;

struct AteEstimate {
  Method method = Method::imp;
  ModelKind model = ModelKind::glm;
  VarianceSource variance = VarianceSource::none;
  double point = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  double level = 0.95;
};

}  // namespace drate::core
