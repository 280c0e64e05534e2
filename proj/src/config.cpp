#include "pev/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pev/normal.hpp"

namespace pev {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw config_error(path + ": " + what);
}

const json& field(const json& j, const std::string& parent, const std::string& name) {
  if (!j.is_object()) fail(parent, "must be an object");
  auto it = j.find(name);
  if (it == j.end()) fail(parent.empty() ? name : parent + "." + name, "missing field");
  return *it;
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == static_cast<double>(static_cast<std::int64_t>(v))) {
      return static_cast<std::int64_t>(v);
    }
  }
  fail(path, "must be an integer");
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "must be a string");
  return j.get<std::string>();
}

GroupMoments group(const json& j, const std::string& path) {
  try {
    return GroupMoments(num(field(j, path, "mean"), path + ".mean"),
                        num(field(j, path, "variance"), path + ".variance"),
                        integer(field(j, path, "n"), path + ".n"));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

VarRole role_from(const std::string& s, const std::string& path) {
  if (s == "outcome") return VarRole::outcome;
  if (s == "treatment") return VarRole::treatment;
  if (s == "covariate") return VarRole::covariate;
  fail(path, "role must be outcome, treatment, or covariate");
}

std::vector<Variable> variables_from(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "must be a nonempty array");
  std::vector<Variable> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    out.push_back(Variable{str(field(j[i], p, "name"), p + ".name"),
                           role_from(str(field(j[i], p, "role"), p + ".role"), p + ".role")});
  }
  return out;
}

MultivariateMoments moments_from(const json& j, const std::string& path,
                                 const std::vector<Variable>* inherit) {
  std::vector<Variable> vars;
  if (j.contains("variables")) {
    vars = variables_from(j["variables"], path + ".variables");
  } else if (inherit != nullptr) {
    vars = *inherit;
  } else {
    fail(path + ".variables", "missing field");
  }
  const auto d = vars.size();

  const json& jm = field(j, path, "means");
  if (!jm.is_array() || jm.size() != d) {
    fail(path + ".means", "must be an array matching the variables");
  }
  Eigen::VectorXd means(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    means(static_cast<Eigen::Index>(i)) = num(jm[i], path + ".means[" + std::to_string(i) + "]");
  }

  const json& jc = field(j, path, "cov");
  if (!jc.is_array() || jc.size() != d) fail(path + ".cov", "must be a d x d array of rows");
  Eigen::MatrixXd cov(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!jc[i].is_array() || jc[i].size() != d) {
      fail(path + ".cov[" + std::to_string(i) + "]", "must be a row of length d");
    }
    for (std::size_t k = 0; k < d; ++k) {
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          num(jc[i][k], path + ".cov[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }

  bool binary = false;
  if (j.contains("w_binary")) {
    if (!j["w_binary"].is_boolean()) fail(path + ".w_binary", "must be a boolean");
    binary = j["w_binary"].get<bool>();
  }

  try {
    return MultivariateMoments(std::move(vars), std::move(means), std::move(cov),
                               integer(field(j, path, "n"), path + ".n"), binary);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

FocalParameter focal_from(const json& j, bool simple) {
  const std::string kind = str(field(j, "focal", "kind"), "focal.kind");
  if (kind == "alpha") {
    if (!simple) fail("focal.kind", "alpha applies to the simple estimator");
    return FocalParameter::make_alpha();
  }
  if (kind == "pi_r") {
    if (!simple) fail("focal.kind", "pi_r applies to the simple estimator");
    return FocalParameter::make_pi_r();
  }
  if (kind == "n_un") {
    if (simple) fail("focal.kind", "n_un applies to the regression estimator");
    return FocalParameter::make_n_un();
  }
  if (kind == "custom") {
    return FocalParameter::make_custom(str(field(j, "focal", "entry"), "focal.entry"),
                                       num(field(j, "focal", "lo"), "focal.lo"),
                                       num(field(j, "focal", "hi"), "focal.hi"));
  }
  fail("focal.kind", "must be alpha, pi_r, n_un, or custom");
}

}  // namespace

AnalysisConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("top level: must be an object");

  const std::string estimator = str(field(j, "", "estimator"), "estimator");
  if (estimator != "simple" && estimator != "regression") {
    fail("estimator", "must be \"simple\" or \"regression\"");
  }
  const bool simple = estimator == "simple";

  const std::string dir_s = str(field(j, "", "direction"), "direction");
  if (dir_s != "positive" && dir_s != "negative") {
    fail("direction", "must be \"positive\" or \"negative\"");
  }
  const Direction direction = dir_s == "positive" ? Direction::positive : Direction::negative;

  const json& jt = field(j, "", "threshold");
  const std::string mode = str(field(jt, "threshold", "mode"), "threshold.mode");
  DecisionRule rule = DecisionRule::statistical(direction);
  if (mode == "statistical") {
    double significance = 0.05;
    if (jt.contains("significance")) {
      significance = num(jt["significance"], "threshold.significance");
      if (!(significance > 0.0 && significance < 1.0)) {
        fail("threshold.significance", "must lie in (0,1)");
      }
    }
    double z = normal::quantile(1.0 - significance / 2.0);
    if (j.contains("z_literal")) z = num(j["z_literal"], "z_literal");
    try {
      rule = DecisionRule::statistical(direction, z);
    } catch (const std::invalid_argument& e) {
      fail("z_literal", e.what());
    }
  } else if (mode == "fixed") {
    if (j.contains("z_literal")) fail("z_literal", "only applies to the statistical threshold");
    rule = DecisionRule::fixed_threshold(direction, num(field(jt, "threshold", "value"),
                                                        "threshold.value"));
  } else {
    fail("threshold.mode", "must be \"statistical\" or \"fixed\"");
  }

  FocalParameter focal = focal_from(field(j, "", "focal"), simple);

  AnalysisConfig out{Scenario{std::in_place_type<SimpleScenario>,
                              GroupMoments(0, 1, 1), GroupMoments(0, 1, 1), 1.0, 1.0, 1.0},
                     rule, focal, {}, 0.0};

  if (simple) {
    const json& jo = field(j, "", "observed");
    const GroupMoments treated = group(field(jo, "observed", "treated"), "observed.treated");
    const GroupMoments control = group(field(jo, "observed", "control"), "observed.control");
    const json& ju = field(j, "", "unobserved");
    const double ybar_c = num(field(ju, "unobserved", "ybar_control"), "unobserved.ybar_control");

    double alpha = 1.0;
    if (ju.contains("alpha")) alpha = num(ju["alpha"], "unobserved.alpha");

    double pi_r;
    if (ju.contains("pi_r")) {
      pi_r = num(ju["pi_r"], "unobserved.pi_r");
    } else if (focal.kind == FocalParameter::Kind::pi_r) {
      pi_r = 0.5;  // placeholder; every use solves over pi_r
    } else {
      fail("unobserved.pi_r", "missing field");
    }

    try {
      out.scenario = SimpleScenario(treated, control, ybar_c, alpha, pi_r);
    } catch (const std::invalid_argument& e) {
      fail("unobserved", e.what());
    }
  } else {
    const double sigma2 = num(field(j, "", "sigma2"), "sigma2");
    const MultivariateMoments observed =
        moments_from(field(j, "", "observed"), "observed", nullptr);
    const auto vars = observed.variables();
    const MultivariateMoments unobserved =
        moments_from(field(j, "", "unobserved"), "unobserved", &vars);
    try {
      out.scenario = RegressionScenario(observed, unobserved, sigma2);
    } catch (const std::invalid_argument& e) {
      fail("sigma2/observed/unobserved", e.what());
    }
  }

  if (j.contains("null_value")) out.null_value = num(j["null_value"], "null_value");

  if (j.contains("pev_grid")) {
    const json& jg = j["pev_grid"];
    if (!jg.is_array() || jg.empty()) fail("pev_grid", "must be a nonempty array");
    for (std::size_t i = 0; i < jg.size(); ++i) {
      const double v = num(jg[i], "pev_grid[" + std::to_string(i) + "]");
      if (!(v > 0.0 && v < 1.0)) {
        fail("pev_grid[" + std::to_string(i) + "]", "targets must lie in (0,1)");
      }
      out.pev_grid.push_back(v);
    }
  } else {
    for (int i = 1; i <= 9; ++i) out.pev_grid.push_back(0.1 * i);
  }

  return out;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pev
