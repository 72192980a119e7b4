#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "drate/core.hpp"
#include "drate/models/family.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

namespace drate::models {

struct GbtParams {
  int trees = 200;
  int depth = 3;
  double rate = 0.05;
  double subsample = 0.8;
  std::uint64_t seed = 0;
};

// Gradient-boosted trees: level-wise exact search over 256-bin quantile
// histograms, Newton leaf values, per-tree Bernoulli row subsampling keyed on
// stable row ids (so fits survive row permutation). Deterministic given seed.
struct TreeEnsembleModel {
  struct Node {
    int feature = -1;   // -1 -> leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;  // leaf output, learning rate already applied
  };
  struct Tree {
    std::vector<Node> nodes;
    double eval(const Eigen::MatrixXd& x, Eigen::Index row) const {
      int at = 0;
      while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(at)];
        at = x(row, nd.feature) <= nd.threshold ? nd.left : nd.right;
      }
      return nodes[static_cast<std::size_t>(at)].value;
    }
  };

  std::vector<Tree> trees;
  double base_score = 0.0;  // link scale
  Family family = Family::gaussian;
  GbtParams params;

  Eigen::VectorXd link(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd f = Eigen::VectorXd::Constant(x.rows(), base_score);
    for (const auto& t : trees)
      for (Eigen::Index i = 0; i < x.rows(); ++i) f[i] += t.eval(x, i);
    return f;
  }

  // response scale: probabilities for binomial
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd f = link(x);
    if (family == Family::binomial)
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = stats::expit(f[i]);
    return f;
  }
};

namespace detail {

inline constexpr int kGbtBins = 256;

struct BinnedFeature {
  std::vector<double> edges;  // upper edge per bin except the last
};

// quantile binning; returns per-row bin ids and cut values
inline BinnedFeature bin_feature(const Eigen::VectorXd& col,
                                 std::vector<std::uint8_t>& idx_out) {
  const Eigen::Index n = col.size();
  std::vector<double> sorted(col.data(), col.data() + n);
  std::sort(sorted.begin(), sorted.end());
  BinnedFeature bf;
  for (int b = 1; b < kGbtBins; ++b) {
    const double q =
        sorted[static_cast<std::size_t>((static_cast<double>(n) - 1.0) *
                                        static_cast<double>(b) / kGbtBins)];
    if (bf.edges.empty() || q > bf.edges.back()) bf.edges.push_back(q);
  }
  idx_out.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it =
        std::lower_bound(bf.edges.begin(), bf.edges.end(), col[i]);
    idx_out[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(it - bf.edges.begin());
  }
  return bf;
}

}  // namespace detail

inline TreeEnsembleModel fit_gbt(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y, Family family,
                                 const GbtParams& params = {},
                                 const std::vector<std::uint64_t>& row_keys =
                                     {}) {
  const Eigen::Index n = y.size();
  const int p = static_cast<int>(x.cols());
  if (x.rows() != n) throw core::DataError("gbt: row count mismatch");
  if (n < 2) throw core::EstimationError("gbt: too few rows");
  if (family == Family::binomial)
    for (Eigen::Index i = 0; i < n; ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw core::DataError("gbt: binomial response must be 0/1");

  std::vector<std::uint64_t> keys = row_keys;
  if (keys.empty()) {
    keys.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      keys[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
  }

  TreeEnsembleModel m;
  m.family = family;
  m.params = params;
  m.base_score = family == Family::gaussian
                     ? stats::mean(y)
                     : stats::logit(stats::clamp01(stats::mean(y), 1e-6));
  if (params.trees <= 0) return m;

  // bin once per fit; row-major index layout keeps the histogram pass in L1
  std::vector<detail::BinnedFeature> bins(static_cast<std::size_t>(p));
  std::vector<std::uint8_t> scratch;
  std::vector<std::uint8_t> bin_rows(static_cast<std::size_t>(n) *
                                     static_cast<std::size_t>(p));
  int max_bins = 1;
  for (int j = 0; j < p; ++j) {
    bins[static_cast<std::size_t>(j)] = detail::bin_feature(x.col(j), scratch);
    for (Eigen::Index i = 0; i < n; ++i)
      bin_rows[static_cast<std::size_t>(i) * static_cast<std::size_t>(p) +
               static_cast<std::size_t>(j)] =
          scratch[static_cast<std::size_t>(i)];
    max_bins = std::max(
        max_bins,
        static_cast<int>(bins[static_cast<std::size_t>(j)].edges.size()) + 1);
  }

  Eigen::VectorXd f = Eigen::VectorXd::Constant(n, m.base_score);
  std::vector<double> g(static_cast<std::size_t>(n)),
      h(static_cast<std::size_t>(n));
  const int leaves_max = 1 << params.depth;
  const std::size_t node_stride =
      static_cast<std::size_t>(p) * static_cast<std::size_t>(max_bins) * 2;
  // histograms: [node][feature][bin] -> interleaved (G, H) pairs; children
  // build only the smaller sibling, the other derives from parent - sibling
  std::vector<double> hist, hist_next;
  std::vector<double> node_g, node_h, next_g, next_h;
  std::vector<long> node_cnt, next_cnt;
  // sampled rows grouped contiguously by frontier slot; partitioning keeps
  // row order stable so accumulation order (and hence fp sums) is fixed
  std::vector<int> order, order_next, right_buf;
  std::vector<std::pair<int, int>> seg, seg_next;

  // per-row subsample stream roots, hoisted out of the tree loop
  std::vector<std::uint64_t> row_seed(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    row_seed[static_cast<std::size_t>(i)] =
        rng::key(params.seed, 0xB005ull, keys[static_cast<std::size_t>(i)]);

  for (int t = 0; t < params.trees; ++t) {
    order.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const bool in =
          rng::u01_stream_at(row_seed[k], static_cast<std::uint64_t>(t)) <
          params.subsample;
      if (!in) continue;
      order.push_back(static_cast<int>(i));
      if (family == Family::gaussian) {
        g[k] = y[i] - f[i];
        h[k] = 1.0;
      } else {
        const double pr = stats::expit(std::max(-30.0, std::min(30.0, f[i])));
        g[k] = y[i] - pr;
        h[k] = std::max(pr * (1.0 - pr), 1e-12);
      }
    }

    TreeEnsembleModel::Tree tree;
    tree.nodes.emplace_back();  // root
    // frontier: node id in tree.nodes per live level slot
    std::vector<int> frontier{0};
    const auto pu = static_cast<std::size_t>(p);

    struct Split {
      double gain = 0.0;
      int feature = -1;
      int bin = -1;
    };

    for (int level = 0; level < params.depth && !frontier.empty(); ++level) {
      const int nodes_live = static_cast<int>(frontier.size());
      if (level == 0) {
        seg.assign(1, {0, static_cast<int>(order.size())});
        hist.assign(node_stride, 0.0);
        node_g.assign(1, 0.0);
        node_h.assign(1, 0.0);
        node_cnt.assign(1, static_cast<long>(order.size()));
        for (const int i : order) {
          const auto k = static_cast<std::size_t>(i);
          const double gk = g[k], hk = h[k];
          node_g[0] += gk;
          node_h[0] += hk;
          const std::uint8_t* br = bin_rows.data() + k * pu;
          for (std::size_t j = 0; j < pu; ++j) {
            double* cell =
                hist.data() +
                (j * static_cast<std::size_t>(max_bins) + br[j]) * 2;
            cell[0] += gk;
            cell[1] += hk;
          }
        }
      }
      // level > 0: hist / node aggregates / segments were prepared when the
      // previous level partitioned its rows

      std::vector<Split> best(static_cast<std::size_t>(nodes_live));
      for (int s = 0; s < nodes_live; ++s) {
        const auto su = static_cast<std::size_t>(s);
        if (node_cnt[su] < 2) continue;
        const double gp = node_g[su], hp = node_h[su];
        const double parent_score = gp * gp / (hp + 1e-12);
        for (int j = 0; j < p; ++j) {
          const double* hb =
              hist.data() + su * node_stride +
              static_cast<std::size_t>(j) * static_cast<std::size_t>(max_bins) *
                  2;
          const int nb = static_cast<int>(
                             bins[static_cast<std::size_t>(j)].edges.size()) +
                         1;
          double gl = 0.0, hl = 0.0;
          for (int b = 0; b + 1 < nb; ++b) {
            gl += hb[2 * b];
            hl += hb[2 * b + 1];
            const double hr = hp - hl;
            if (hl < 1e-12 || hr < 1e-12) continue;
            const double gr = gp - gl;
            const double gain = gl * gl / (hl + 1e-12) +
                                gr * gr / (hr + 1e-12) - parent_score;
            if (gain > best[su].gain + 1e-12) {
              best[su] = {gain, j, b};
            }
          }
        }
      }

      // materialize children, remap frontier; children of split pair q take
      // adjacent next slots 2q / 2q+1
      std::vector<int> next_frontier;
      std::vector<int> child_slot(static_cast<std::size_t>(nodes_live) * 2,
                                  -1);
      std::vector<int> pair_parent;  // parent slot per split pair
      for (int s = 0; s < nodes_live; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const auto node_id = static_cast<std::size_t>(frontier[su]);
        if (best[su].feature < 0) {
          tree.nodes[node_id].value =
              params.rate * node_g[su] / (node_h[su] + 1e-12);
          continue;
        }
        // grow the vector before taking a reference into it
        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& nd = tree.nodes[node_id];
        nd.feature = best[su].feature;
        nd.threshold = bins[static_cast<std::size_t>(nd.feature)]
                           .edges[static_cast<std::size_t>(best[su].bin)];
        nd.left = left_id;
        nd.right = left_id + 1;
        child_slot[su * 2] = static_cast<int>(next_frontier.size());
        next_frontier.push_back(nd.left);
        child_slot[su * 2 + 1] = static_cast<int>(next_frontier.size());
        next_frontier.push_back(nd.right);
        pair_parent.push_back(s);
      }

      // stable-partition each splitting segment into contiguous child
      // segments; rows settled at a leaf just drop out
      order_next.clear();
      seg_next.assign(next_frontier.size(), {0, 0});
      for (int s = 0; s < nodes_live; ++s) {
        const auto su = static_cast<std::size_t>(s);
        if (best[su].feature < 0) continue;
        const auto feat = static_cast<std::size_t>(best[su].feature);
        const auto cut = static_cast<std::uint8_t>(best[su].bin);
        const int lo = static_cast<int>(order_next.size());
        right_buf.clear();
        for (int idx = seg[su].first; idx < seg[su].second; ++idx) {
          const int i = order[static_cast<std::size_t>(idx)];
          if (bin_rows[static_cast<std::size_t>(i) * pu + feat] <= cut)
            order_next.push_back(i);
          else
            right_buf.push_back(i);
        }
        const int mid = static_cast<int>(order_next.size());
        order_next.insert(order_next.end(), right_buf.begin(),
                          right_buf.end());
        seg_next[static_cast<std::size_t>(child_slot[su * 2])] = {lo, mid};
        seg_next[static_cast<std::size_t>(child_slot[su * 2 + 1])] = {
            mid, static_cast<int>(order_next.size())};
      }

      if (level + 1 == params.depth) {
        // bottom level: everything remaining becomes a leaf
        for (std::size_t s = 0; s < next_frontier.size(); ++s) {
          double lg = 0.0, lh = 0.0;
          for (int idx = seg_next[s].first; idx < seg_next[s].second; ++idx) {
            const auto k =
                static_cast<std::size_t>(order_next[static_cast<std::size_t>(idx)]);
            lg += g[k];
            lh += h[k];
          }
          auto& nd = tree.nodes[static_cast<std::size_t>(next_frontier[s])];
          nd.value = params.rate * lg / (lh + 1e-12);
        }
      } else if (!next_frontier.empty()) {
        // build histograms for the smaller child of each pair from its rows;
        // the larger sibling follows as parent minus sibling
        const std::size_t next_live = next_frontier.size();
        hist_next.resize(next_live * node_stride);
        next_g.assign(next_live, 0.0);
        next_h.assign(next_live, 0.0);
        next_cnt.assign(next_live, 0);
        for (std::size_t s = 0; s < next_live; ++s)
          next_cnt[s] = seg_next[s].second - seg_next[s].first;
        for (std::size_t q = 0; q * 2 < next_live; ++q) {
          const bool left_small = next_cnt[q * 2] <= next_cnt[q * 2 + 1];
          const std::size_t sml = q * 2 + (left_small ? 0 : 1);
          const std::size_t lrg = q * 2 + (left_small ? 1 : 0);
          double* hb = hist_next.data() + sml * node_stride;
          std::fill(hb, hb + node_stride, 0.0);  // large slot is overwritten
          for (int idx = seg_next[sml].first; idx < seg_next[sml].second;
               ++idx) {
            const auto k =
                static_cast<std::size_t>(order_next[static_cast<std::size_t>(idx)]);
            const double gk = g[k], hk = h[k];
            next_g[sml] += gk;
            next_h[sml] += hk;
            const std::uint8_t* br = bin_rows.data() + k * pu;
            for (std::size_t j = 0; j < pu; ++j) {
              double* cell =
                  hb + (j * static_cast<std::size_t>(max_bins) + br[j]) * 2;
              cell[0] += gk;
              cell[1] += hk;
            }
          }
          const auto ps = static_cast<std::size_t>(pair_parent[q]);
          const double* hp = hist.data() + ps * node_stride;
          const double* hs = hb;
          double* hl = hist_next.data() + lrg * node_stride;
          for (std::size_t c = 0; c < node_stride; ++c) hl[c] = hp[c] - hs[c];
          next_g[lrg] = node_g[ps] - next_g[sml];
          next_h[lrg] = node_h[ps] - next_h[sml];
        }
        hist.swap(hist_next);
        node_g.swap(next_g);
        node_h.swap(next_h);
        node_cnt = next_cnt;
      }
      order.swap(order_next);
      seg.swap(seg_next);
      frontier = std::move(next_frontier);
    }
    (void)leaves_max;

    for (Eigen::Index i = 0; i < n; ++i) f[i] += tree.eval(x, i);
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace drate::models
