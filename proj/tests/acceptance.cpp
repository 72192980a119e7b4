// Acceptance gate: seven criteria, one per command-line argument (1..7 or
// "all").  Each check prints a [PASS]/[FAIL] line; the process exits nonzero
// if any executed check fails.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "drate/drate.hpp"
#include "oracle_constants.hpp"

using namespace drate;

namespace {

int g_failures = 0;

void check(bool ok, int criterion, const std::string& what) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
            << what << std::endl;
  if (!ok) ++g_failures;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

sim::ScenarioSpec scenario_of(const std::string& tag, int n, double tau = 0.0) {
  auto spec = sim::parse_scenario(tag);
  spec.n = n;
  spec.tau = tau;
  return spec;
}

core::NuisanceEstimates glm_on_w(const sim::ScenarioDraw& draw,
                                 bool correct_ps, bool correct_outcome) {
  const auto& d = draw.data;
  const Eigen::Index n = d.n();
  core::NuisanceEstimates nu;
  nu.kind = core::ModelKind::glm;
  if (correct_ps) {
    const auto ps = models::fit_logit(draw.w, d.a);
    nu.e_hat = ps.predict_proba(draw.w);
    for (Eigen::Index i = 0; i < n; ++i)
      nu.e_hat[i] = std::clamp(nu.e_hat[i], core::kPsClamp, 1.0 - core::kPsClamp);
  } else {
    const double share = stats::mean(d.a);
    nu.e_hat = Eigen::VectorXd::Constant(
        n, std::clamp(share, core::kPsClamp, 1.0 - core::kPsClamp));
  }
  if (correct_outcome) {
    for (int arm = 0; arm <= 1; ++arm) {
      const auto rows = d.arm_rows_by_id(arm);
      Eigen::MatrixXd xw(static_cast<Eigen::Index>(rows.size()), draw.w.cols());
      Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        xw.row(static_cast<Eigen::Index>(r)) = draw.w.row(rows[r]);
        ya[static_cast<Eigen::Index>(r)] = d.y[rows[r]];
      }
      const auto fit = models::fit_ols(xw, ya);
      (arm == 1 ? nu.m1_hat : nu.m0_hat) = fit.predict(draw.w);
    }
  } else {
    double s1 = 0, s0 = 0;
    for (Eigen::Index i = 0; i < n; ++i) (d.a[i] == 1.0 ? s1 : s0) += d.y[i];
    nu.m1_hat = Eigen::VectorXd::Constant(n, s1 / double(d.n_treated()));
    nu.m0_hat = Eigen::VectorXd::Constant(n, s0 / double(d.n_control()));
  }
  return nu;
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
  const auto draw = sim::gen_dataset(scenario_of("homo-large", 400), 11);
  const auto& d = draw.data;

  models::NuisanceOptions no;
  no.kind = core::ModelKind::glm;
  no.selected = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  no.seed = 5;
  auto nu = models::fit_nuisances(d, no);

  // AIPTW == IPTW when both outcome predictions are identically zero
  auto nu0 = nu;
  nu0.m1_hat.setZero();
  nu0.m0_hat.setZero();
  const double aiptw0 = estimators::estimate_aiptw(d, nu0).point;
  const double iptw = estimators::estimate_iptw(d, nu0).point;
  check(std::abs(aiptw0 - iptw) <= 1e-12, 1,
        "AIPTW equals IPTW under zero outcome predictions (diff=" +
            num(std::abs(aiptw0 - iptw)) + ")");

  // TMLE == IMP when the fluctuation is forced to zero
  estimators::TmleOptions zopt;
  zopt.fluctuation = estimators::TmleFluctuation::zero;
  const double tmle0 = estimators::estimate_tmle(d, nu, zopt).est.point;
  const double imp = estimators::estimate_imp(d, nu).point;
  check(std::abs(tmle0 - imp) <= 1e-12, 1,
        "TMLE equals IMP under zero fluctuation (diff=" +
            num(std::abs(tmle0 - imp)) + ")");

  // the two algebraic AIPTW forms agree termwise
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double a = d.a[i], y = d.y[i], e = nu.e_hat[i];
    const double m1 = nu.m1_hat[i], m0 = nu.m0_hat[i];
    const double plain = m1 - m0 + a * (y - m1) / e - (1 - a) * (y - m0) / (1 - e);
    const double rearranged =
        (a * y / e - (a - e) / e * m1) -
        ((1 - a) * y / (1 - e) + (a - e) / (1 - e) * m0);
    worst = std::max(worst, std::abs(plain - rearranged));
    worst = std::max(
        worst, std::abs(plain - estimators::aiptw_contribution(a, y, e, m1, m0)));
  }
  check(worst <= 1e-10, 1,
        "AIPTW identity and rearranged forms agree (max diff=" + num(worst) + ")");

  // matching usage counts sum to nM
  for (const int m : {1, 3}) {
    const auto ms = estimators::build_match_set(d, nu, m);
    const double ksum = ms.k_count.sum();
    check(ksum == double(d.n()) * m, 1,
          "sum of K equals nM for M=" + std::to_string(m) +
              " (sum=" + num(ksum) + ")");
  }

  // SuperLearner weights live on the simplex
  {
    const auto rows = d.arm_rows_by_id(1);
    Eigen::MatrixXd xa(static_cast<Eigen::Index>(rows.size()), d.p());
    Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
    std::vector<std::uint64_t> keys(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      xa.row(static_cast<Eigen::Index>(r)) = d.x.row(rows[r]);
      ya[static_cast<Eigen::Index>(r)] = d.y[rows[r]];
      keys[r] = d.ids[static_cast<std::size_t>(rows[r])];
    }
    models::SlOptions so;
    so.seed = 99;
    const auto sl =
        models::fit_superlearner(xa, ya, models::Family::gaussian, so, keys);
    double wsum = 0.0;
    double wmin = 0.0;
    for (const auto& mem : sl.members) {
      wsum += mem.weight;
      wmin = std::min(wmin, mem.weight);
    }
    check(std::abs(wsum - 1.0) <= 1e-10 && wmin >= -1e-10, 1,
          "SuperLearner weights on the simplex (sum=" + num(wsum) +
              ", min=" + num(wmin) + ")");
  }

  // mse identity: mse = bias^2 + (1 - 1/R) var_b
  {
    rng::Stream gen(rng::key(7, 0xD15C));
    std::vector<double> pts(57);
    for (auto& v : pts) v = gen.normal();
    const double truth = 0.3;
    std::vector<double> err(pts.size()), sq(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      err[i] = pts[i] - truth;
      sq[i] = err[i] * err[i];
    }
    const double r = double(pts.size());
    const double bias = stats::ksum(err) / r;
    const double mse = stats::ksum(sq) / r;
    const double var_b = stats::variance(pts);
    const double diff = std::abs(mse - (bias * bias + (1.0 - 1.0 / r) * var_b));
    check(diff <= 1e-10, 1, "mse identity holds (diff=" + num(diff) + ")");
  }
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
  // IMP: m1=[2,4], m0=[1,1] -> 2
  {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 1.0;
    Eigen::VectorXd a(2), y(2);
    a << 1, 0;
    y << 2, 1;
    auto d = core::validate_dataset(x, a, y);
    core::NuisanceEstimates nu;
    nu.e_hat = Eigen::VectorXd::Constant(2, 0.5);
    nu.m1_hat = Eigen::VectorXd(2);
    nu.m1_hat << 2, 4;
    nu.m0_hat = Eigen::VectorXd::Constant(2, 1.0);
    const double imp = estimators::estimate_imp(d, nu).point;
    check(imp == 2.0, 2, "IMP hand case equals 2 (got " + num(imp) + ")");

    // IPTW 2-unit case: (A=1,Y=2,e=.5),(A=0,Y=1,e=.5) -> 1
    const double iptw = estimators::estimate_iptw(d, nu).point;
    check(iptw == 1.0, 2, "IPTW 2-unit case equals 1 (got " + num(iptw) + ")");

    // AIPTW analytic se on the same 2 units with zero outcome predictions:
    // contributions {4,-2}, tau=1, phi={3,-3}, se = sqrt(18)/2
    auto nu0 = nu;
    nu0.m1_hat.setZero();
    nu0.m0_hat.setZero();
    const auto est = estimators::estimate_aiptw(d, nu0);
    const auto iv = inference::aiptw_ic_variance(d, nu0, est.point, 0.95);
    check(std::abs(iv.se - std::sqrt(18.0) / 2.0) <= 1e-12, 2,
          "AIPTW 2-unit analytic se equals 3/sqrt(2) (got " + num(iv.se) + ")");

    // TMLE influence curve on the same instance under zero fluctuation:
    // phi={2,-2} with m1=[1,1], m0=[0,0] -> se = sqrt(2)
    core::NuisanceEstimates nut;
    nut.e_hat = Eigen::VectorXd::Constant(2, 0.5);
    nut.m1_hat = Eigen::VectorXd::Constant(2, 1.0);
    nut.m0_hat = Eigen::VectorXd::Constant(2, 0.0);
    estimators::TmleOptions zopt;
    zopt.fluctuation = estimators::TmleFluctuation::zero;
    const auto tf = estimators::estimate_tmle(d, nut, zopt);
    const auto tiv = inference::tmle_ic_variance(d, nut, tf, 0.95);
    check(std::abs(tiv.se - std::sqrt(2.0)) <= 1e-12, 2,
          "TMLE 2-unit analytic se equals sqrt(2) (got " + num(tiv.se) + ")");
  }

  // AIPTW 1-unit contribution: A=1, Y=3, e=0.75, m1=2, m0=1.
  // The display's own arithmetic gives 3/0.75 - (1/3)*2 - 1 = 7/3 (the
  // quoted 5/3 mis-evaluates 3/0.75).
  {
    const double c = estimators::aiptw_contribution(1.0, 3.0, 0.75, 2.0, 1.0);
    check(std::abs(c - 7.0 / 3.0) <= 1e-15, 2,
          "AIPTW 1-unit rearranged-display case equals 7/3 (got " + num(c) + ")");
  }

  // DSM 4-unit duplicate-score instance: matched-pair mean difference
  {
    Eigen::MatrixXd x(4, 1);
    x << 0.0, 0.0, 1.0, 1.0;
    Eigen::VectorXd a(4), y(4);
    a << 1, 0, 1, 0;
    y << 5, 2, 9, 4;
    auto d = core::validate_dataset(x, a, y);
    core::NuisanceEstimates nu;
    nu.e_hat = Eigen::VectorXd(4);
    nu.e_hat << 0.3, 0.3, 0.7, 0.7;  // exact duplicates across arms
    nu.m1_hat = Eigen::VectorXd(4);
    nu.m1_hat << 1, 1, 2, 2;
    nu.m0_hat = Eigen::VectorXd(4);
    nu.m0_hat << 0, 0, 1, 1;
    const auto res = estimators::estimate_dsm(d, nu, 1);
    // matched pairs (5,2) and (9,4): ((5-2) + (9-4)) / 2 = 4
    check(std::abs(res.est.point - 4.0) <= 1e-10, 2,
          "DSM 4-unit duplicate-score case equals 4 (got " +
              num(res.est.point) + ")");
  }

  // Rubin combine: points [1,3], within [0,0] -> point 2, se sqrt(3)
  {
    Eigen::VectorXd pts(2), win(2);
    pts << 1, 3;
    win << 0, 0;
    const auto rr = inference::rubin_combine(pts, win, 0.95, 100.0);
    check(rr.point == 2.0 && std::abs(rr.se - std::sqrt(3.0)) <= 1e-12, 2,
          "Rubin [1,3] case gives point 2, se sqrt(3) (got " + num(rr.point) +
              ", " + num(rr.se) + ")");
  }

  // compute_metrics: points [1,-1], truth 0 -> bias 0, mse 1
  {
    harness::RunResult rr;
    rr.truth = 0.0;
    for (const double p : {1.0, -1.0}) {
      harness::ReplicateRows rep;
      rep.ok = true;
      core::AteEstimate e;
      e.method = core::Method::imp;
      e.model = core::ModelKind::glm;
      e.variance = core::VarianceSource::none;
      e.point = p;
      rep.rows.push_back(e);
      rr.replicates.push_back(rep);
    }
    harness::RunSettings rs;
    rs.scenario = scenario_of("homo-large", 100);
    const auto mets = harness::compute_metrics(rr, rs);
    const bool ok = mets.size() == 1 && mets[0].bias == 0.0 && mets[0].mse == 1.0;
    check(ok, 2, "compute_metrics [1,-1] case gives bias 0, mse 1");
  }
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
  const int reps = 200;
  const auto spec = scenario_of("homo-large", 2000);
  std::vector<double> b_ps_only_aiptw, b_ps_only_tmle;  // correct PS, flat outcome
  std::vector<double> b_out_only_aiptw, b_out_only_tmle;  // flat PS, correct outcome
  std::vector<double> b_iptw_flat;

  for (int r = 0; r < reps; ++r) {
    const auto draw = sim::gen_dataset(spec, rng::key(0xACC3, 3, r));
    const auto& d = draw.data;
    const auto nu_ps = glm_on_w(draw, true, false);
    const auto nu_out = glm_on_w(draw, false, true);
    b_ps_only_aiptw.push_back(estimators::estimate_aiptw(d, nu_ps).point);
    b_ps_only_tmle.push_back(estimators::estimate_tmle(d, nu_ps).est.point);
    b_out_only_aiptw.push_back(estimators::estimate_aiptw(d, nu_out).point);
    b_out_only_tmle.push_back(estimators::estimate_tmle(d, nu_out).est.point);
    b_iptw_flat.push_back(estimators::estimate_iptw(d, nu_out).point);
  }
  const auto bias = [](const std::vector<double>& v) {
    return stats::ksum(v) / double(v.size());
  };
  const double b1 = bias(b_ps_only_aiptw), b2 = bias(b_ps_only_tmle);
  const double b3 = bias(b_out_only_aiptw), b4 = bias(b_out_only_tmle);
  const double bw = bias(b_iptw_flat);
  check(std::abs(b1) < 0.1, 3,
        "AIPTW bias with correct PS, flat outcome (" + num(b1) + ")");
  check(std::abs(b2) < 0.1, 3,
        "TMLE bias with correct PS, flat outcome (" + num(b2) + ")");
  check(std::abs(b3) < 0.1, 3,
        "AIPTW bias with flat PS, correct outcome (" + num(b3) + ")");
  check(std::abs(b4) < 0.1, 3,
        "TMLE bias with flat PS, correct outcome (" + num(b4) + ")");
  check(std::abs(bw) >= std::abs(b3), 3,
        "IPTW with flat PS at least as biased as AIPTW (" + num(bw) + " vs " +
            num(b3) + ")");
}

// ---------------------------------------------------------------- criterion 4
void criterion_4() {
  harness::RunSettings rs;
  rs.scenario = scenario_of("homo-large", 2000);
  rs.reps = 200;
  rs.threads = 1;
  rs.pipeline.methods = {core::Method::aiptw, core::Method::tmle};
  rs.pipeline.kinds = {core::ModelKind::sl};
  rs.pipeline.boot = 200;
  rs.pipeline.level = 0.95;
  rs.pipeline.seed = 0xC4;

  const auto res = harness::run_replications(rs);
  const auto mets = harness::compute_metrics(res, rs);
  for (const auto& m : mets)
    std::cout << "  criterion 4 cell: " << core::to_string(m.method) << "/"
              << core::to_string(m.variance) << " coverage=" << num(m.coverage)
              << " type1=" << num(m.type1) << " width=" << num(m.width)
              << " bias=" << num(m.bias) << std::endl;
  for (const auto method : {core::Method::aiptw, core::Method::tmle}) {
    bool found = false;
    for (const auto& m : mets) {
      if (m.method != method ||
          m.variance != core::VarianceSource::bootstrap)
        continue;
      found = true;
      check(m.coverage >= 0.91 && m.coverage <= 0.99, 4,
            core::to_string(method) + "+SL bootstrap coverage in [0.91,0.99] (" +
                num(m.coverage) + ")");
      check(m.type1 <= 0.09, 4,
            core::to_string(method) + "+SL type I error <= 0.09 (" +
                num(m.type1) + ")");
    }
    if (!found)
      check(false, 4, core::to_string(method) + " bootstrap cell missing");
  }
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
  const auto spec = scenario_of("hetero-large", 2000);
  auto metric_of = [](const std::vector<harness::MetricsRow>& mets,
                      core::Method method, core::ModelKind kind,
                      bool want_mse) {
    for (const auto& m : mets)
      if (m.method == method && m.kind == kind)
        return want_mse ? m.mse : m.bias;
    return std::numeric_limits<double>::quiet_NaN();
  };

  harness::RunSettings rs;
  rs.scenario = spec;
  rs.reps = 200;
  rs.threads = 1;
  rs.pipeline.methods = {core::Method::imp, core::Method::aiptw,
                         core::Method::tmle, core::Method::dsm};
  rs.pipeline.kinds = {core::ModelKind::glm, core::ModelKind::sl};
  rs.pipeline.boot = 0;
  rs.pipeline.seed = 0xC5;
  const auto res_a = harness::run_replications(rs);
  const auto mets_a = harness::compute_metrics(res_a, rs);

  harness::RunSettings rp = rs;
  rp.pipeline.methods = {core::Method::pencomp};
  rp.pipeline.boot = 16;  // desk-scale Rubin draws; the library default is 500
  rp.pipeline.seed = 0xC5F;
  const auto res_b = harness::run_replications(rp);
  const auto mets_b = harness::compute_metrics(res_b, rp);

  for (const auto& m : mets_a)
    std::cout << "  criterion 5 cell: " << core::to_string(m.method) << "/"
              << core::to_string(m.kind) << " bias=" << num(m.bias)
              << " mse=" << num(m.mse) << std::endl;
  for (const auto& m : mets_b)
    std::cout << "  criterion 5 cell: " << core::to_string(m.method) << "/"
              << core::to_string(m.kind) << " bias=" << num(m.bias)
              << " mse=" << num(m.mse) << std::endl;

  for (const auto method :
       {core::Method::aiptw, core::Method::tmle, core::Method::dsm}) {
    const double sl = metric_of(mets_a, method, core::ModelKind::sl, true);
    const double glm = metric_of(mets_a, method, core::ModelKind::glm, true);
    check(sl < glm, 5,
          core::to_string(method) + " MSE with SL < GLM (" + num(sl) + " vs " +
              num(glm) + ")");
  }
  {
    const double sl = metric_of(mets_b, core::Method::pencomp,
                                core::ModelKind::sl, true);
    const double glm = metric_of(mets_b, core::Method::pencomp,
                                 core::ModelKind::glm, true);
    check(sl < glm, 5,
          "pencomp MSE with SL < GLM (" + num(sl) + " vs " + num(glm) + ")");
  }
  {
    const double sl =
        std::abs(metric_of(mets_a, core::Method::imp, core::ModelKind::sl, false));
    const double glm = std::abs(
        metric_of(mets_a, core::Method::imp, core::ModelKind::glm, false));
    check(sl < glm, 5,
          "IMP |bias| with SL < GLM (" + num(sl) + " vs " + num(glm) + ")");
  }
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
  const auto spec = scenario_of("hetero-large", 2000);
  const auto frozen = sim::true_ate_oracle(spec, oracle::kHeteroOracleDraws,
                                           oracle::kHeteroOracleSeed);
  // frozen constants are 10-digit decimal records; 1e-9 absorbs their
  // quantization plus instruction-level rounding while sitting six orders
  // of magnitude below the Monte Carlo SE
  check(std::abs(frozen.value - oracle::kHeteroTrueAte) <= 1e-9 &&
            std::abs(frozen.mc_se - oracle::kHeteroTrueAteSe) <= 1e-9, 6,
        "oracle reproduces the frozen constant (value=" + num(frozen.value) +
            ")");
  const auto alt =
      sim::true_ate_oracle(spec, oracle::kHeteroOracleDraws, 0xA11CE5ull);
  const double diff = std::abs(alt.value - oracle::kHeteroTrueAte);
  check(diff <= 4.0 * oracle::kHeteroTrueAteSe, 6,
        "independent-seed oracle within 4 SE of frozen constant (diff=" +
            num(diff) + ", 4*SE=" + num(4.0 * oracle::kHeteroTrueAteSe) + ")");
}

// ---------------------------------------------------------------- criterion 7
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_7() {
  const std::string cli = DRATE_CLI_PATH;
  const std::string base = "acceptance7_out";
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);

  auto run_sim = [&](const std::string& dir, int threads) {
    const std::string cmd =
        cli + " simulate --scenario homo-small --n 300 --reps 4 --boot 8" +
        " --estimators imp,iptw,aiptw,tmle,dsm,pencomp --models glm --seed 7" +
        " --threads " + std::to_string(threads) + " --out-dir " + base + "/" +
        dir + " > " + base + "/" + dir + ".stdout";
    return std::system(cmd.c_str());
  };
  bool ran = run_sim("t1", 1) == 0 && run_sim("t1b", 1) == 0 &&
             run_sim("t4", 4) == 0;
  check(ran, 7, "CLI simulate runs cleanly");
  if (ran) {
    for (const std::string f : {"metrics.csv", "estimates.csv"}) {
      check(slurp(base + "/t1/" + f) == slurp(base + "/t1b/" + f) &&
                !slurp(base + "/t1/" + f).empty(), 7,
            "simulate rerun byte-identical: " + f);
      check(slurp(base + "/t1/" + f) == slurp(base + "/t4/" + f), 7,
            "simulate at 4 threads byte-identical: " + f);
    }
    check(slurp(base + "/t1.stdout") == slurp(base + "/t1b.stdout"), 7,
          "simulate stdout identical across reruns");
  }

  // analyze path: write a small CSV, run twice, compare report bytes
  {
    const auto draw = sim::gen_dataset(scenario_of("homo-large", 400), 21);
    io::CsvWriter w(base + "/data.csv");
    std::vector<std::string> hdr{"y", "a"};
    for (Eigen::Index j = 0; j < draw.data.p(); ++j)
      hdr.push_back("x" + std::to_string(j + 1));
    w.row(hdr);
    for (Eigen::Index i = 0; i < draw.data.n(); ++i) {
      std::vector<std::string> row{io::fmt(draw.data.y[i]),
                                   io::fmt(draw.data.a[i])};
      for (Eigen::Index j = 0; j < draw.data.p(); ++j)
        row.push_back(io::fmt(draw.data.x(i, j)));
      w.row(row);
    }
    w.close();
    auto run_an = [&](const std::string& dir) {
      const std::string cmd =
          cli + " analyze --data " + base + "/data.csv" +
          " --outcome-col y --treatment-col a --boot 32 --seed 3" +
          " --estimators imp,iptw,aiptw,tmle,dsm,pencomp --models glm" +
          " --out-dir " + base + "/" + dir + " > " + base + "/" + dir +
          ".stdout";
      return std::system(cmd.c_str());
    };
    const bool ok = run_an("a1") == 0 && run_an("a2") == 0;
    check(ok, 7, "CLI analyze runs cleanly");
    if (ok)
      check(slurp(base + "/a1/ate_report.csv") ==
                    slurp(base + "/a2/ate_report.csv") &&
                !slurp(base + "/a1/ate_report.csv").empty(),
            7, "analyze rerun byte-identical: ate_report.csv");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string which = argc > 1 ? argv[1] : "all";
  const bool all = which == "all";
  if (all || which == "1") criterion_1();
  if (all || which == "2") criterion_2();
  if (all || which == "3") criterion_3();
  if (all || which == "4") criterion_4();
  if (all || which == "5") criterion_5();
  if (all || which == "6") criterion_6();
  if (all || which == "7") criterion_7();
  if (g_failures > 0) {
    std::cout << g_failures << " acceptance check(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all executed acceptance checks passed" << std::endl;
  return 0;
}
