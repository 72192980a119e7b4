#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "drate/drate.hpp"

namespace {

using namespace drate;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

core::Method parse_method(const std::string& s) {
  if (s == "imp") return core::Method::imp;
  if (s == "iptw") return core::Method::iptw;
  if (s == "aiptw") return core::Method::aiptw;
  if (s == "tmle") return core::Method::tmle;
  if (s == "dsm") return core::Method::dsm;
  if (s == "pencomp") return core::Method::pencomp;
  throw core::ConfigError("unknown estimator: " + s);
}

core::ModelKind parse_kind(const std::string& s) {
  if (s == "glm") return core::ModelKind::glm;
  if (s == "gam") return core::ModelKind::gam;
  if (s == "sl") return core::ModelKind::sl;
  throw core::ConfigError("unknown model: " + s);
}

std::string fmt4(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size(); ++j)
      width[j] = std::max(width[j], r[j].size());
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) line += "  ";
      line += r[j];
      line.append(width[j] - r[j].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    std::cout << line << '\n';
  }
}

struct CommonOpts {
  std::string estimators = "imp,iptw,aiptw,tmle,dsm,pencomp";
  std::string models = "glm";
  int boot = 200;
  std::uint64_t seed = 0;
  double level = 0.95;
  std::string out_dir = ".";
  int threads = 1;
  std::string tmle_eps = "shared";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--estimators", o.estimators,
                  "comma list: imp,iptw,aiptw,tmle,dsm,pencomp");
  cmd->add_option("--models", o.models, "comma list: glm,gam,sl");
  cmd->add_option("--boot", o.boot, "bootstrap replicates (0 disables)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--level", o.level, "confidence level");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_option("--tmle-eps", o.tmle_eps, "shared or split fluctuation");
}

pipeline::Settings pipeline_of(const CommonOpts& o) {
  pipeline::Settings ps;
  ps.methods.clear();
  for (const auto& s : split_list(o.estimators))
    ps.methods.push_back(parse_method(s));
  ps.kinds.clear();
  for (const auto& s : split_list(o.models)) ps.kinds.push_back(parse_kind(s));
  if (ps.methods.empty()) throw core::ConfigError("no estimators requested");
  if (ps.kinds.empty()) throw core::ConfigError("no models requested");
  ps.boot = o.boot;
  ps.seed = o.seed;
  ps.level = o.level;
  if (o.level <= 0.0 || o.level >= 1.0)
    throw core::ConfigError("level must lie in (0, 1)");
  if (o.boot < 0) throw core::ConfigError("boot must be >= 0");
  if (o.threads < 1) throw core::ConfigError("threads must be >= 1");
  if (o.tmle_eps == "shared")
    ps.tmle.eps = estimators::TmleEps::shared;
  else if (o.tmle_eps == "split")
    ps.tmle.eps = estimators::TmleEps::split;
  else
    throw core::ConfigError("tmle-eps must be shared or split");
  if (ps.boot < 2 && pipeline::wants(ps, core::Method::pencomp))
    throw core::ConfigError("pencomp needs --boot >= 2");
  ps.gbt.seed = o.seed;
  return ps;
}

std::string join_names(const std::vector<std::string>& names,
                       const std::vector<int>& idx) {
  std::string out;
  for (const int j : idx) {
    if (!out.empty()) out += ';';
    out += names[static_cast<std::size_t>(j)];
  }
  return out.empty() ? "(none)" : out;
}

int run_simulate(const CommonOpts& common, const std::string& scenario, int n,
                 int reps, double tau, const std::string& w_moments) {
  harness::RunSettings rs;
  rs.scenario = sim::parse_scenario(scenario);
  rs.scenario.n = n;
  rs.scenario.tau = tau;
  if (w_moments == "population")
    rs.scenario.moments = sim::WMoments::population;
  else if (w_moments != "sample")
    throw core::ConfigError("w-moments must be sample or population");
  if (n < 2) throw core::ConfigError("n must be >= 2");
  rs.reps = reps;
  rs.threads = common.threads;
  rs.pipeline = pipeline_of(common);

  const auto res = harness::run_replications(rs);
  const auto metrics = harness::compute_metrics(res, rs);

  std::filesystem::create_directories(common.out_dir);
  io::CsvWriter mw(common.out_dir + "/metrics.csv");
  mw.row({"scenario", "estimator", "model", "ci_variant", "R", "bias", "mse",
          "coverage", "width", "type1", "var_ratio"});
  for (const auto& m : metrics)
    mw.row({m.scenario, core::to_string(m.method), core::to_string(m.kind),
            core::to_string(m.variance), io::fmt(m.r_used), io::fmt(m.bias),
            io::fmt(m.mse), io::fmt(m.coverage), io::fmt(m.width),
            io::fmt(m.type1), io::fmt(m.var_ratio)});
  mw.close();

  io::CsvWriter ew(common.out_dir + "/estimates.csv");
  ew.row({"replicate", "estimator", "model", "ci_variant", "point", "se",
          "ci_lo", "ci_hi"});
  for (const auto& rep : res.replicates) {
    if (!rep.ok) continue;
    for (const auto& e : rep.rows)
      ew.row({io::fmt(rep.replicate), core::to_string(e.method),
              core::to_string(e.model), core::to_string(e.variance),
              io::fmt(e.point), io::fmt(e.se), io::fmt(e.ci_lo),
              io::fmt(e.ci_hi)});
  }
  ew.close();

  std::cout << "scenario " << sim::tag(rs.scenario) << "  n=" << n
            << "  reps=" << reps << "  ok=" << (reps - res.failed)
            << "  truth=" << fmt4(res.truth) << '\n';
  std::vector<std::vector<std::string>> table;
  table.push_back({"estimator", "model", "ci_variant", "R", "bias", "mse",
                   "coverage", "width", "type1", "var_ratio"});
  for (const auto& m : metrics)
    table.push_back({core::to_string(m.method), core::to_string(m.kind),
                     core::to_string(m.variance), io::fmt(m.r_used),
                     fmt4(m.bias), fmt4(m.mse), fmt4(m.coverage),
                     fmt4(m.width), fmt4(m.type1), fmt4(m.var_ratio)});
  print_table(table);
  return 0;
}

int run_analyze(const CommonOpts& common, const std::string& data_path,
                const std::string& outcome_col, const std::string& treat_col,
                const std::string& covariate_cols) {
  const auto loaded = io::load_csv_dataset(data_path, outcome_col, treat_col,
                                           split_list(covariate_cols));
  if (loaded.rows_dropped > 0)
    std::cerr << "note: dropped " << loaded.rows_dropped
              << " rows with missing or non-numeric values\n";

  const auto ps = pipeline_of(common);
  const auto out = pipeline::run(loaded.data, ps);
  const auto& d = loaded.data;
  const auto selected = join_names(d.covariate_names, out.diag.selected);

  std::filesystem::create_directories(common.out_dir);
  io::CsvWriter rw(common.out_dir + "/ate_report.csv");
  std::vector<std::string> header{"estimator", "model",  "ci_variant",
                                  "point",     "se",     "ci_lo",
                                  "ci_hi",     "level",  "n",
                                  "n_treated", "n_control"};
  for (const char* arm : {"treated", "control"})
    for (const char* q : {"05", "25", "50", "75", "95"})
      header.push_back(std::string("ps_q") + q + "_" + arm);
  header.push_back("ps_clamped");
  header.push_back("selected");
  rw.row(header);
  for (const auto& e : out.rows) {
    std::vector<std::string> row{
        core::to_string(e.method), core::to_string(e.model),
        core::to_string(e.variance), io::fmt(e.point),  io::fmt(e.se),
        io::fmt(e.ci_lo),            io::fmt(e.ci_hi),  io::fmt(e.level),
        io::fmt(static_cast<int>(d.n())),
        io::fmt(static_cast<int>(d.n_treated())),
        io::fmt(static_cast<int>(d.n_control()))};
    for (const auto& qv : {out.diag.ps_quantiles_treated,
                           out.diag.ps_quantiles_control})
      for (Eigen::Index q = 0; q < 5; ++q) row.push_back(io::fmt(qv[q]));
    row.push_back(io::fmt(out.diag.ps_clamped));
    row.push_back(selected);
    rw.row(row);
  }
  rw.close();

  if (out.diag.ps_separation)
    std::cerr << "warning: propensity fit flagged possible separation\n";
  std::cout << "n=" << d.n() << "  treated=" << d.n_treated()
            << "  control=" << d.n_control() << "  selected=" << selected
            << '\n';
  std::vector<std::vector<std::string>> table;
  table.push_back(
      {"estimator", "model", "ci_variant", "point", "se", "ci_lo", "ci_hi"});
  for (const auto& e : out.rows)
    table.push_back({core::to_string(e.method), core::to_string(e.model),
                     core::to_string(e.variance), fmt4(e.point), fmt4(e.se),
                     fmt4(e.ci_lo), fmt4(e.ci_hi)});
  print_table(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"doubly robust average treatment effect toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonOpts sim_opts;
  std::string scenario = "homo-large";
  int n = 2000;
  int reps = 200;
  double tau = 0.0;
  std::string w_moments = "sample";
  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo study");
  sim_cmd->add_option("--scenario", scenario,
                      "homo-large, homo-small, hetero-large, hetero-small");
  sim_cmd->add_option("--n", n, "sample size per replicate");
  sim_cmd->add_option("--reps", reps, "Monte Carlo replicates");
  sim_cmd->add_option("--tau", tau, "constant treatment effect component");
  sim_cmd->add_option("--w-moments", w_moments,
                      "sample or population standardization");
  add_common(sim_cmd, sim_opts);

  CommonOpts an_opts;
  std::string data_path, outcome_col = "y", treat_col = "a";
  std::string covariate_cols;
  auto* an_cmd = app.add_subcommand("analyze", "estimate effects from a CSV");
  an_cmd->add_option("--data", data_path, "input CSV path")->required();
  an_cmd->add_option("--outcome-col", outcome_col, "outcome column name");
  an_cmd->add_option("--treatment-col", treat_col, "treatment column name");
  an_cmd->add_option("--covariate-cols", covariate_cols,
                     "comma list (default: all other columns)");
  add_common(an_cmd, an_opts);

  try {
    app.parse(argc, argv);
    if (sim_cmd->parsed())
      return run_simulate(sim_opts, scenario, n, reps, tau, w_moments);
    return run_analyze(an_opts, data_path, outcome_col, treat_col,
                       covariate_cols);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const drate::core::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const drate::core::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const drate::core::EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << '\n';
    return 4;
  }
}
