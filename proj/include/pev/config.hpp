#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pev/solvers.hpp"

namespace pev {

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A parsed scenario document. The JSON schema (field names are part of the
// external contract):
//
//   estimator   "simple" | "regression"
//   direction   "positive" | "negative"
//   threshold   {"mode":"statistical","significance":0.05}
//               or {"mode":"fixed","value":<number>}
//   z_literal   optional number; overrides z = quantile(1 - significance/2)
//   null_value  optional number, default 0; the null effect for curve output
//   sigma2      regression only: known residual variance
//   observed / unobserved   per-estimator sample blocks (see README)
//   focal       {"kind":"alpha"|"pi_r"|"n_un"|"custom", ["entry","lo","hi"]}
//   pev_grid    optional array of targets in (0,1); default 0.1..0.9
struct AnalysisConfig {
  Scenario scenario;
  DecisionRule rule;
  FocalParameter focal;
  std::vector<double> pev_grid;
  double null_value = 0.0;

  bool is_simple() const { return std::holds_alternative<SimpleScenario>(scenario); }
};

AnalysisConfig load_config(const std::string& path);
AnalysisConfig parse_config(const std::string& json_text);

}  // namespace pev
