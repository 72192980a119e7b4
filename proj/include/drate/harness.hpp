#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "drate/core.hpp"
#include "drate/parallel.hpp"
#include "drate/pipeline.hpp"
#include "drate/sim.hpp"
#include "drate/stats.hpp"

namespace drate::harness {

// Monte Carlo truth is evaluated once per run with a fixed, documented seed
// so that repeated studies of the same scenario share one reference value.
inline constexpr std::uint64_t kTruthSeed = 0x5EEDBA5Eull;
inline constexpr std::uint64_t kTruthDraws = 1'000'000ull;

struct RunSettings {
  sim::ScenarioSpec scenario;
  int reps = 200;
  pipeline::Settings pipeline;
  int threads = 1;
  double max_fail_fraction = 0.10;
};

struct ReplicateRows {
  int replicate = 0;
  bool ok = false;
  std::vector<core::AteEstimate> rows;
};

struct RunResult {
  std::vector<ReplicateRows> replicates;
  double truth = 0.0;
  double truth_se = 0.0;
  int failed = 0;
};

struct MetricsRow {
  std::string scenario;
  core::Method method{};
  core::ModelKind kind{};
  core::VarianceSource variance{};
  int r_used = 0;
  double bias = 0.0;
  double mse = 0.0;
  double coverage = 0.0;
  double width = 0.0;
  double type1 = 0.0;
  double var_ratio = 0.0;
};

inline RunResult run_replications(const RunSettings& rs) {
  if (rs.reps < 1) throw core::ConfigError("reps must be >= 1");
  RunResult out;
  out.replicates.resize(static_cast<std::size_t>(rs.reps));

  const auto truth = sim::true_ate_oracle(rs.scenario, kTruthDraws, kTruthSeed);
  out.truth = truth.value;
  out.truth_se = truth.mc_se;

  parallel::parallel_for(
      static_cast<std::size_t>(rs.reps), rs.threads, [&](std::size_t r) {
        ReplicateRows slot;
        slot.replicate = static_cast<int>(r);
        const std::uint64_t sr =
            rng::key(rs.pipeline.seed, 0x1E9ull, static_cast<std::uint64_t>(r));
        try {
          const auto draw = sim::gen_dataset(rs.scenario, rng::key(sr, 0xDA7Aull));
          auto ps = rs.pipeline;
          ps.seed = rng::key(sr, 0x919Eull);
          slot.rows = pipeline::run(draw.data, ps).rows;
          slot.ok = true;
        } catch (const core::ConfigError&) {
          throw;  // a configuration problem will not heal across replicates
        } catch (const core::DataError&) {
          slot.ok = false;
        } catch (const core::EstimationError&) {
          slot.ok = false;
        }
        out.replicates[r] = std::move(slot);
      });

  for (const auto& rep : out.replicates)
    if (!rep.ok) ++out.failed;
  if (out.failed > rs.max_fail_fraction * rs.reps ||
      out.failed == rs.reps)
    throw core::TooManyFailuresError(
        std::to_string(out.failed) + " of " + std::to_string(rs.reps) +
        " replicates failed");
  return out;
}

inline std::vector<MetricsRow> compute_metrics(const RunResult& res,
                                               const RunSettings& rs) {
  struct Cell {
    core::Method method;
    core::ModelKind kind;
    core::VarianceSource variance;
    std::vector<double> point, se, lo, hi;
  };
  std::vector<Cell> cells;
  auto cell_of = [&](const core::AteEstimate& e) -> Cell& {
    for (auto& c : cells)
      if (c.method == e.method && c.kind == e.model && c.variance == e.variance)
        return c;
    cells.push_back(Cell{e.method, e.model, e.variance, {}, {}, {}, {}});
    return cells.back();
  };
  for (const auto& rep : res.replicates) {
    if (!rep.ok) continue;
    for (const auto& e : rep.rows) {
      auto& c = cell_of(e);
      c.point.push_back(e.point);
      c.se.push_back(e.se);
      c.lo.push_back(e.ci_lo);
      c.hi.push_back(e.ci_hi);
    }
  }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<MetricsRow> out;
  out.reserve(cells.size());
  for (const auto& c : cells) {
    MetricsRow row;
    row.scenario = sim::tag(rs.scenario);
    row.method = c.method;
    row.kind = c.kind;
    row.variance = c.variance;
    row.r_used = static_cast<int>(c.point.size());
    const double r = static_cast<double>(row.r_used);

    std::vector<double> err(c.point.size()), sqerr(c.point.size());
    for (std::size_t i = 0; i < c.point.size(); ++i) {
      err[i] = c.point[i] - res.truth;
      sqerr[i] = err[i] * err[i];
    }
    row.bias = stats::ksum(err) / r;
    row.mse = stats::ksum(sqerr) / r;

    const bool has_iv = c.variance != core::VarianceSource::none &&
                        std::all_of(c.se.begin(), c.se.end(),
                                    [](double v) { return std::isfinite(v); });
    if (has_iv && row.r_used >= 2) {
      std::vector<double> cov(c.point.size()), wid(c.point.size()),
          rej(c.point.size()), se2(c.point.size());
      for (std::size_t i = 0; i < c.point.size(); ++i) {
        cov[i] = (c.lo[i] <= res.truth && res.truth <= c.hi[i]) ? 1.0 : 0.0;
        wid[i] = c.hi[i] - c.lo[i];
        rej[i] = (0.0 < c.lo[i] || 0.0 > c.hi[i]) ? 1.0 : 0.0;
        se2[i] = c.se[i] * c.se[i];
      }
      row.coverage = stats::ksum(cov) / r;
      row.width = stats::ksum(wid) / r;
      row.type1 = stats::ksum(rej) / r;
      const double vb = stats::variance(c.point);
      row.var_ratio = vb > 0.0 ? (stats::ksum(se2) / r) / vb : nan;
    } else {
      row.coverage = nan;
      row.width = nan;
      row.type1 = nan;
      row.var_ratio = nan;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace drate::harness
