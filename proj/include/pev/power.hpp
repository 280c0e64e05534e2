#pragma once

#include <vector>

#include "pev/decision.hpp"

namespace pev {

// Retesting the null hypothesis on the combined sample. With the
// statistical threshold the probit of the PEV collapses to z -/+ T where
// T = delta_id_hat / se_ideal, and 1 - PEV is the power of the retest
// against the alternative delta = delta_id_hat.
struct RetestReport {
  double t_ratio = 0.0;
  double pev = 0.0;
  double power = 0.0;  // defined as 1 - pev
  double delta_id_hat = 0.0;
  double se_ideal = 0.0;
};

// Requires a statistical-threshold rule; the T-ratio identity does not
// apply to fixed thresholds (evaluate pev() directly instead).
RetestReport retest(const DeltaPosterior& dist, const DecisionRule& rule);

// Sampled density pair for the retest picture: the null law
// N(null_mean, variance of dist) and the combined-sample law, over a grid
// covering span standard deviations around both means. The PEV is the
// combined-law mass on the fail-to-reject side of delta_sharp.
struct CurvePoint {
  double x = 0.0;
  double null_density = 0.0;
  double ideal_density = 0.0;
};

struct CurveData {
  std::vector<CurvePoint> points;
  double delta_sharp = 0.0;
  double pev = 0.0;
  double null_mean = 0.0;
};

CurveData curve_data(double null_mean, const DeltaPosterior& dist, const DecisionRule& rule,
                     int points, double span);

}  // namespace pev
