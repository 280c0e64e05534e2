#pragma once

#include <limits>

#include "pev/normal.hpp"

namespace pev {

// Direction of the effect claimed from the observed sample.
enum class Direction { positive, negative };

// Gaussian law of the true effect conditional on the combined
// (observed + hypothesized unobserved) sample.
struct DeltaPosterior {
  DeltaPosterior(double mean, double variance);

  double mean;
  double variance;

  double sd() const;
};

// The decision threshold delta# for claiming an effect: either a fixed
// value in outcome units, or the statistical boundary +/- z * se of the
// combined-sample estimate.
class DecisionRule {
 public:
  static DecisionRule fixed_threshold(Direction direction, double delta_sharp);
  static DecisionRule statistical(Direction direction, double z = normal::default_z());

  Direction direction() const { return direction_; }
  bool is_statistical() const { return statistical_; }

  double z() const;            // statistical mode only
  double fixed_value() const;  // fixed mode only

  // Resolves the threshold. Statistical mode needs the combined-sample
  // standard error and returns +z*se (positive) or -z*se (negative).
  double delta_sharp(double se_ideal = std::numeric_limits<double>::quiet_NaN()) const;

 private:
  DecisionRule(Direction d, bool statistical, double value)
      : direction_(d), statistical_(statistical), value_(value) {}

  Direction direction_;
  bool statistical_;
  double value_;  // z in statistical mode, delta# in fixed mode
};

// Probability that the combined sample fails to support the claimed effect:
//   positive direction:  Phi((delta# - mean) / sd)
//   negative direction:  1 - Phi((delta# - mean) / sd)
// se_ideal is required (and must be positive) in statistical mode and
// ignored in fixed mode. The result is clamped to the open interval (0,1).
double pev(const DeltaPosterior& dist, const DecisionRule& rule,
           double se_ideal = std::numeric_limits<double>::quiet_NaN());

}  // namespace pev
