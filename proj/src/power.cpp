#include "pev/power.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pev {

RetestReport retest(const DeltaPosterior& dist, const DecisionRule& rule) {
  if (!rule.is_statistical()) {
    throw std::invalid_argument(
        "retest: the T-ratio identity needs a statistical threshold; use pev() for fixed ones");
  }
  RetestReport r;
  r.se_ideal = dist.sd();
  r.delta_id_hat = dist.mean;
  r.t_ratio = dist.mean / r.se_ideal;
  const double z = rule.z();
  r.pev = rule.direction() == Direction::positive ? normal::cdf(z - r.t_ratio)
                                                  : normal::cdf(z + r.t_ratio);
  r.pev = std::clamp(r.pev, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
  r.power = 1.0 - r.pev;
  return r;
}

CurveData curve_data(double null_mean, const DeltaPosterior& dist, const DecisionRule& rule,
                     int points, double span) {
  if (points < 2) throw std::invalid_argument("curve_data: need at least two points");
  if (!(span > 0.0)) throw std::invalid_argument("curve_data: span must be positive");

  // Both curves share the combined-sample standard error.
  const double sd = dist.sd();
  const double lo = std::min(null_mean, dist.mean) - span * sd;
  const double hi = std::max(null_mean, dist.mean) + span * sd;

  CurveData out;
  out.null_mean = null_mean;
  out.delta_sharp = rule.delta_sharp(sd);
  out.pev = pev(dist, rule, sd);
  out.points.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    CurvePoint p;
    p.x = x;
    p.null_density = normal::pdf((x - null_mean) / sd) / sd;
    p.ideal_density = normal::pdf((x - dist.mean) / sd) / sd;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace pev
