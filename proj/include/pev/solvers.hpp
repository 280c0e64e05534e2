#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pev/decision.hpp"
#include "pev/regression.hpp"
#include "pev/simple.hpp"

namespace pev {

using Scenario = std::variant<SimpleScenario, RegressionScenario>;

// The single unobserved-sample quantity a threshold search varies. Custom
// focals name one entry of the hypothesized moments:
//   simple estimator:      "ybar_c_un"
//   regression estimator:  "mean:<var>" or "cov:<var>,<var>"
// and carry the search bracket [lo, hi].
struct FocalParameter {
  enum class Kind { alpha, pi_r, n_un, custom };

  Kind kind = Kind::alpha;
  std::string custom_entry;
  double lo = 0.0;
  double hi = 0.0;

  static FocalParameter make_alpha() { return {Kind::alpha, "", 0.0, 0.0}; }
  static FocalParameter make_pi_r() { return {Kind::pi_r, "", 0.0, 0.0}; }
  static FocalParameter make_n_un() { return {Kind::n_un, "", 0.0, 0.0}; }
  static FocalParameter make_custom(std::string entry, double lo, double hi) {
    return {Kind::custom, std::move(entry), lo, hi};
  }
};

enum class RowOutcome { ok, infeasible, error };

// One row of a robustness sweep: the focal-parameter threshold at which
// the PEV crosses pev_target, plus derived thresholds where they apply.
// Infeasibility (no crossing in the admissible range) is an answer, not a
// failure; numeric errors are carried per row without aborting a sweep.
struct ThresholdRow {
  double pev_target = 0.0;
  RowOutcome outcome = RowOutcome::error;
  double threshold = 0.0;  // meaningful when outcome == ok
  std::optional<double> ybar_t_un;
  std::optional<double> effect_un;
  std::optional<double> delta_id;
  std::string note;
};

// PEV, its probit, and the combined-sample effect estimate at one value of
// the focal parameter.
struct FocalPoint {
  double pev = 0.0;
  double probit = 0.0;
  double delta_id = 0.0;
};

FocalPoint eval_focal(const Scenario& scn, const DecisionRule& rule, const FocalParameter& focal,
                      double x);

// Threshold of alpha (closed form; the probit is linear in alpha). The
// scenario's own alpha is ignored. Fails when the probit does not depend
// on alpha (pi_r = 1).
ThresholdRow solve_alpha(double pev_target, const SimpleScenario& scn, const DecisionRule& rule);

// Threshold of pi_r (closed form; quadratic in sqrt(pi_r)). The scenario's
// own pi_r is ignored. When both quadratic roots fall in (0,1) the row
// reports the one whose upper side satisfies PEV < target and notes the
// other. No admissible root is reported as infeasible.
ThresholdRow solve_pi(double pev_target, const SimpleScenario& scn, const DecisionRule& rule);

struct NUnSolveOptions {
  std::int64_t cap = 10'000'000;
};

// Integer threshold of the unobserved sample size: the largest n_un with
// PEV < target when the probit increases in n_un. PEV already at or above
// the target at n_un = 0 is infeasible. A non-monotone probit falls back
// to an exhaustive scan up to the cap and notes every crossing.
ThresholdRow solve_n_un(double pev_target, const RegressionScenario& scn, const DecisionRule& rule,
                        const NUnSolveOptions& options = {});

// Bisection for a monotone probit function: probit_fn(lo) and probit_fn(hi)
// must straddle the probit of the target. Stops when the bracket shrinks to
// 1e-10 * max(1, |hi|) or after 200 iterations.
double solve_generic(const std::function<double(double)>& probit_fn, double pev_target, double lo,
                     double hi);

// One ThresholdRow per target, in grid order. Row-level failures are
// recorded in the row and never abort the sweep.
std::vector<ThresholdRow> sweep(const std::vector<double>& pev_targets,
                                const FocalParameter& focal, const Scenario& scn,
                                const DecisionRule& rule, const NUnSolveOptions& options = {});

// Range of the PEV and of the combined-sample effect when the focal
// parameter is only known to lie in [lo, hi]. Endpoint evaluation when the
// probit is monotone over the interval (checked by sampling); otherwise a
// dense-grid envelope with the monotone flag cleared.
struct PevBound {
  double pev_lo = 0.0, pev_hi = 0.0;
  double delta_lo = 0.0, delta_hi = 0.0;
  bool monotone = true;
};

PevBound bound_pev(double lo, double hi, const FocalParameter& focal, const Scenario& scn,
                   const DecisionRule& rule);

}  // namespace pev
