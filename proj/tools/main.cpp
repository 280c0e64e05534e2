// pev — external-validity robustness analysis for randomized experiments.
//
// Subcommands:
//   pev      point evaluation of the PEV and the combined-sample estimate
//   analyze  threshold sweep over a grid of target PEV values (CSV)
//   curves   sampled null/combined density pairs for the retest picture (CSV)
//   bound    PEV and effect intervals from an interval belief about the focal
//
// Exit codes: 0 success, 2 invalid config or flags, 3 every sweep row
// infeasible, 4 numeric failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "pev/config.hpp"
#include "pev/errors.hpp"
#include "pev/power.hpp"

namespace {

using namespace pev;

struct Fmt {
  int precision = -1;  // <0 keeps the table-style defaults

  std::string g(double v, int digits) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
  }
  std::string f(double v, int places) const {
    if (precision >= 1) return g(v, precision);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
  }
  std::string prob(double v) const { return f(v, 4); }    // probabilities, alpha, pi_r
  std::string effect(double v) const { return f(v, 2); }  // outcome-scale quantities
  std::string ratio(double v) const { return f(v, 4); }   // dimensionless ratios
  std::string raw(double v) const { return g(v, precision >= 1 ? precision : 9); }
};

struct PointEvaluation {
  double pev = 0.0;
  double delta_id = 0.0;
  double se_id = 0.0;
  double delta_sharp = 0.0;
  bool statistical = false;
  double t_ratio = 0.0;
  double power = 0.0;
};

DeltaPosterior point_distribution(const AnalysisConfig& cfg) {
  if (cfg.is_simple()) {
    return delta_distribution_pi(std::get<SimpleScenario>(cfg.scenario));
  }
  const auto& reg = std::get<RegressionScenario>(cfg.scenario);
  return delta_distribution_reg(reg, reg.unobserved.n());
}

PointEvaluation evaluate_point(const AnalysisConfig& cfg) {
  const DeltaPosterior dist = point_distribution(cfg);
  const double se = dist.sd();

  PointEvaluation out;
  out.delta_id = dist.mean;
  out.se_id = se;
  out.pev = pev(dist, cfg.rule, se);
  out.delta_sharp = cfg.rule.delta_sharp(se);
  out.statistical = cfg.rule.is_statistical();
  if (out.statistical) {
    const RetestReport r = retest(dist, cfg.rule);
    out.t_ratio = r.t_ratio;
    out.power = r.power;
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot open output file: " + path);
  f << content;
}

int run_pev(const std::string& config_path, const std::string& out_path, const Fmt& fmt) {
  const AnalysisConfig cfg = load_config(config_path);
  const PointEvaluation e = evaluate_point(cfg);

  std::string report;
  report += std::string("estimator    ") + (cfg.is_simple() ? "simple" : "regression") + "\n";
  report += "pev          " + fmt.prob(e.pev) + "\n";
  report += "delta_id     " + fmt.effect(e.delta_id) + "\n";
  report += "se_id        " + fmt.effect(e.se_id) + "\n";
  report += "delta_sharp  " + fmt.effect(e.delta_sharp) + "\n";
  if (e.statistical) {
    report += "t_ratio      " + fmt.ratio(e.t_ratio) + "\n";
    report += "power        " + fmt.prob(e.power) + "\n";
  }
  std::cout << report;

  if (!out_path.empty()) {
    nlohmann::json j{{"estimator", cfg.is_simple() ? "simple" : "regression"},
                     {"pev", e.pev},
                     {"delta_id", e.delta_id},
                     {"se_id", e.se_id},
                     {"delta_sharp", e.delta_sharp}};
    if (e.statistical) {
      j["t_ratio"] = e.t_ratio;
      j["power"] = e.power;
    }
    write_file(out_path, j.dump(2) + "\n");
  }
  return 0;
}

int run_analyze(const std::string& config_path, const std::string& out_path, const Fmt& fmt) {
  const AnalysisConfig cfg = load_config(config_path);
  const auto rows = sweep(cfg.pev_grid, cfg.focal, cfg.scenario, cfg.rule);

  const bool alpha_focal = cfg.focal.kind == FocalParameter::Kind::alpha;
  const bool integer_focal = cfg.focal.kind == FocalParameter::Kind::n_un;

  std::string csv = alpha_focal ? "pev,threshold,ybar_t_un,effect_un,delta_id\n"
                                : "pev,threshold,delta_id\n";
  int ok_rows = 0, infeasible_rows = 0;
  for (const auto& row : rows) {
    csv += fmt.prob(row.pev_target) + ",";
    if (row.outcome == RowOutcome::ok) {
      ++ok_rows;
      if (integer_focal) {
        csv += std::to_string(static_cast<long long>(row.threshold));
      } else {
        csv += fmt.prob(row.threshold);
      }
    } else {
      if (row.outcome == RowOutcome::infeasible) ++infeasible_rows;
      csv += row.outcome == RowOutcome::infeasible ? "infeasible" : "error";
    }
    if (alpha_focal) {
      csv += ",";
      if (row.ybar_t_un) csv += fmt.effect(*row.ybar_t_un);
      csv += ",";
      if (row.effect_un) csv += fmt.effect(*row.effect_un);
    }
    csv += ",";
    if (row.delta_id) csv += fmt.effect(*row.delta_id);
    csv += "\n";
  }

  std::cout << csv;
  if (!out_path.empty()) write_file(out_path, csv);

  if (ok_rows == 0 && infeasible_rows > 0) return 3;
  if (ok_rows == 0) return 4;
  return 0;
}

int run_curves(const std::string& config_path, const std::string& out_path, int points, double span,
               std::vector<long long> n_un_list, const Fmt& fmt) {
  const AnalysisConfig cfg = load_config(config_path);
  if (cfg.is_simple() && !n_un_list.empty()) {
    throw config_error("--n-un applies to regression scenarios only");
  }

  struct Block {
    std::string id;
    CurveData data;
  };
  std::vector<Block> blocks;

  if (cfg.is_simple()) {
    const auto& scn = std::get<SimpleScenario>(cfg.scenario);
    blocks.push_back({"base", curve_data(cfg.null_value, delta_distribution_pi(scn), cfg.rule,
                                         points, span)});
  } else {
    const auto& reg = std::get<RegressionScenario>(cfg.scenario);
    if (n_un_list.empty()) n_un_list.push_back(reg.unobserved.n());
    for (long long n : n_un_list) {
      if (n < 0) throw config_error("--n-un values must be nonnegative");
      blocks.push_back({"n_un=" + std::to_string(n),
                        curve_data(cfg.null_value, delta_distribution_reg(reg, n), cfg.rule,
                                   points, span)});
    }
  }

  std::string csv = "x,null_density,ideal_density,scenario_id\n";
  for (const auto& block : blocks) {
    csv += "# scenario=" + block.id + " delta_sharp=" + fmt.raw(block.data.delta_sharp) +
           " pev=" + fmt.prob(block.data.pev) + "\n";
    for (const auto& p : block.data.points) {
      csv += fmt.raw(p.x) + "," + fmt.raw(p.null_density) + "," + fmt.raw(p.ideal_density) + "," +
             block.id + "\n";
    }
  }

  std::cout << csv;
  if (!out_path.empty()) write_file(out_path, csv);
  return 0;
}

int run_bound(const std::string& config_path, double lo, double hi, const Fmt& fmt) {
  const AnalysisConfig cfg = load_config(config_path);
  if (!(lo < hi)) throw config_error("--lo must be strictly below --hi");

  const PevBound b = bound_pev(lo, hi, cfg.focal, cfg.scenario, cfg.rule);
  if (!b.monotone) {
    std::cout << "warning: probit is not monotone over the interval; "
                 "reporting a dense-grid envelope\n";
  }
  std::cout << "pev_interval    [" << fmt.prob(b.pev_lo) << ", " << fmt.prob(b.pev_hi) << "]\n";
  std::cout << "delta_interval  [" << fmt.effect(b.delta_lo) << ", " << fmt.effect(b.delta_hi)
            << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"External-validity robustness of causal inferences"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int precision = -1;
  int points = 512;
  double span = 6.0;
  std::vector<long long> n_un_list;
  double lo = 0.0, hi = 0.0;
  std::uint64_t seed = 0;  // reserved for sampling-based subcommands

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--config", config_path, "scenario configuration (JSON)")->required();
    cmd->add_option("--precision", precision, "significant digits for all numeric output");
    cmd->add_option("--seed", seed, "seed for sampling-based output (reserved)");
    if (with_out) cmd->add_option("--out", out_path, "also write the result to this file");
  };

  CLI::App* c_pev = app.add_subcommand("pev", "point evaluation of the PEV");
  add_common(c_pev, true);

  CLI::App* c_analyze = app.add_subcommand("analyze", "threshold sweep over the pev grid");
  add_common(c_analyze, true);

  CLI::App* c_curves = app.add_subcommand("curves", "density curves for the retest picture");
  add_common(c_curves, true);
  c_curves->add_option("--points", points, "grid points per scenario")->check(CLI::Range(2, 1 << 20));
  c_curves->add_option("--span", span, "standard deviations covered around both means");
  c_curves->add_option("--n-un", n_un_list, "unobserved sample sizes (regression)")
      ->delimiter(',');

  CLI::App* c_bound = app.add_subcommand("bound", "PEV interval from a focal interval");
  add_common(c_bound, false);
  c_bound->add_option("--lo", lo, "lower end of the focal interval")->required();
  c_bound->add_option("--hi", hi, "upper end of the focal interval")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Fmt fmt{precision};
  try {
    if (app.got_subcommand(c_pev)) return run_pev(config_path, out_path, fmt);
    if (app.got_subcommand(c_analyze)) return run_analyze(config_path, out_path, fmt);
    if (app.got_subcommand(c_curves)) {
      return run_curves(config_path, out_path, points, span, n_un_list, fmt);
    }
    if (app.got_subcommand(c_bound)) return run_bound(config_path, lo, hi, fmt);
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
