#include "pev/decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pev {

DeltaPosterior::DeltaPosterior(double mean_, double variance_) : mean(mean_), variance(variance_) {
  if (!std::isfinite(mean)) throw std::invalid_argument("DeltaPosterior: mean must be finite");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("DeltaPosterior: variance must be positive");
  }
}

double DeltaPosterior::sd() const { return std::sqrt(variance); }

DecisionRule DecisionRule::fixed_threshold(Direction direction, double delta_sharp) {
  if (!std::isfinite(delta_sharp)) {
    throw std::invalid_argument("DecisionRule: fixed threshold must be finite");
  }
  return DecisionRule(direction, false, delta_sharp);
}

DecisionRule DecisionRule::statistical(Direction direction, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::invalid_argument("DecisionRule: z must be positive");
  }
  return DecisionRule(direction, true, z);
}

double DecisionRule::z() const {
  if (!statistical_) throw std::logic_error("DecisionRule: z() requires statistical mode");
  return value_;
}

double DecisionRule::fixed_value() const {
  if (statistical_) throw std::logic_error("DecisionRule: fixed_value() requires fixed mode");
  return value_;
}

double DecisionRule::delta_sharp(double se_ideal) const {
  if (!statistical_) return value_;
  if (!(se_ideal > 0.0) || !std::isfinite(se_ideal)) {
    throw std::invalid_argument("DecisionRule: statistical threshold needs a positive se_ideal");
  }
  return direction_ == Direction::positive ? value_ * se_ideal : -value_ * se_ideal;
}

double pev(const DeltaPosterior& dist, const DecisionRule& rule, double se_ideal) {
  const double sharp = rule.delta_sharp(se_ideal);
  const double u = (sharp - dist.mean) / dist.sd();
  double p = rule.direction() == Direction::positive ? normal::cdf(u) : 1.0 - normal::cdf(u);
  // Keep the result strictly inside (0,1) for finite inputs.
  p = std::min(p, std::nextafter(1.0, 0.0));
  p = std::max(p, std::nextafter(0.0, 1.0));
  return p;
}

}  // namespace pev
