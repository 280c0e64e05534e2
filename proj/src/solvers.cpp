#include "pev/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pev/errors.hpp"

namespace pev {

namespace {

void check_target(double pev_target) {
  if (!(pev_target > 0.0 && pev_target < 1.0)) {
    throw std::invalid_argument("pev target must lie strictly in (0,1)");
  }
}

SimpleScenario apply_simple_focal(const SimpleScenario& scn, const FocalParameter& focal,
                                  double x) {
  switch (focal.kind) {
    case FocalParameter::Kind::alpha:
      return scn.with_alpha(x);
    case FocalParameter::Kind::pi_r:
      return scn.with_pi_r(x);
    case FocalParameter::Kind::custom:
      if (focal.custom_entry == "ybar_c_un") return scn.with_ybar_c_un(x);
      throw std::invalid_argument("unknown simple-estimator focal entry: " + focal.custom_entry);
    case FocalParameter::Kind::n_un:
      throw std::invalid_argument("n_un focal applies to the regression estimator");
  }
  throw std::logic_error("unreachable");
}

RegressionScenario apply_regression_focal(const RegressionScenario& scn,
                                          const FocalParameter& focal, double x) {
  if (focal.kind != FocalParameter::Kind::custom) {
    throw std::invalid_argument("only custom focals modify regression moments");
  }
  const auto& entry = focal.custom_entry;
  const auto& un = scn.unobserved;
  if (entry.rfind("mean:", 0) == 0) {
    const int i = un.index_of(entry.substr(5));
    if (i < 0) throw std::invalid_argument("unknown variable in focal entry: " + entry);
    return scn.with_unobserved(un.with_mean(i, x));
  }
  if (entry.rfind("cov:", 0) == 0) {
    const auto rest = entry.substr(4);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("focal cov entry must be cov:<var>,<var>");
    }
    const int i = un.index_of(rest.substr(0, comma));
    const int j = un.index_of(rest.substr(comma + 1));
    if (i < 0 || j < 0) throw std::invalid_argument("unknown variable in focal entry: " + entry);
    return scn.with_unobserved(un.with_cov(i, j, x));
  }
  throw std::invalid_argument("unknown regression focal entry: " + entry);
}

double probit_simple(const SimpleScenario& scn, const DecisionRule& rule) {
  return rule.is_statistical()
             ? probit_pev_statistical(scn, rule.direction(), rule.z())
             : probit_pev_fixed(scn, rule.fixed_value(), rule.direction());
}

}  // namespace

FocalPoint eval_focal(const Scenario& scn, const DecisionRule& rule, const FocalParameter& focal,
                      double x) {
  FocalPoint out;
  if (const auto* simple = std::get_if<SimpleScenario>(&scn)) {
    const SimpleScenario at = apply_simple_focal(*simple, focal, x);
    const DeltaPosterior dist = delta_distribution_pi(at);
    out.probit = probit_simple(at, rule);
    out.pev = pev(dist, rule, se_ideal_simple(at));
    out.delta_id = dist.mean;
    return out;
  }
  const auto& reg = std::get<RegressionScenario>(scn);
  std::int64_t n_un = reg.unobserved.n();
  RegressionScenario at = reg;
  if (focal.kind == FocalParameter::Kind::n_un) {
    n_un = static_cast<std::int64_t>(std::llround(x));
  } else {
    at = apply_regression_focal(reg, focal, x);
  }
  const DeltaPosterior dist = delta_distribution_reg(at, n_un);
  out.probit = probit_pev_reg(at, n_un, rule);
  out.pev = pev(dist, rule, dist.sd());
  out.delta_id = dist.mean;
  return out;
}

ThresholdRow solve_alpha(double pev_target, const SimpleScenario& scn, const DecisionRule& rule) {
  check_target(pev_target);
  if (!(scn.pi_r < 1.0)) {
    throw std::invalid_argument(
        "solve_alpha: pi_r = 1 makes the probit independent of alpha (no unobserved mass)");
  }

  // The probit is linear in alpha; two evaluations pin the line exactly.
  const double p0 = probit_simple(scn.with_alpha(0.0), rule);
  const double p1 = probit_simple(scn.with_alpha(1.0), rule);
  const double slope = p1 - p0;
  if (std::abs(slope) < 1e-14) {
    throw std::invalid_argument("solve_alpha: probit does not depend on alpha");
  }

  const double t = normal::quantile(pev_target);
  const double alpha = (t - p0) / slope;

  ThresholdRow row;
  row.pev_target = pev_target;
  row.outcome = RowOutcome::ok;
  row.threshold = alpha;
  row.ybar_t_un = alpha * scn.ybar_c_un;
  row.effect_un = (alpha - 1.0) * scn.ybar_c_un;
  row.delta_id = delta_distribution_pi(scn.with_alpha(alpha)).mean;
  return row;
}

ThresholdRow solve_pi(double pev_target, const SimpleScenario& scn, const DecisionRule& rule) {
  check_target(pev_target);

  // Multiplying the probit equation by se1 * sqrt(pi) turns it into a
  // quadratic in u = sqrt(pi_r): A u^2 + B u + C = 0.
  const double se1 = se_ideal_simple(scn.with_pi_r(1.0));
  const double t = normal::quantile(pev_target);
  const double ybar_c = scn.ybar_c_un;
  const double effect_ob = scn.treated_observed.mean - scn.control_observed.mean;

  double a = ybar_c * (scn.alpha - 1.0) - effect_ob;
  double c = ybar_c * (1.0 - scn.alpha);
  double b;
  if (rule.is_statistical()) {
    b = (rule.z() - t) * se1;
  } else {
    b = -t * se1;
    c += rule.fixed_value();
  }
  if (rule.direction() == Direction::negative) {
    a = -a;
    c = -c;
  }

  std::vector<double> roots;
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) > 1e-14) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      const double q = -0.5 * (b + std::copysign(s, b));
      roots.push_back(q / a);
      if (q != 0.0) roots.push_back(c / q);
    }
  }

  std::vector<double> in_range;
  for (double u : roots) {
    if (u > 1e-12 && u < 1.0 - 1e-12) in_range.push_back(u);
  }
  std::sort(in_range.begin(), in_range.end());
  in_range.erase(std::unique(in_range.begin(), in_range.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-13; }),
                 in_range.end());

  ThresholdRow row;
  row.pev_target = pev_target;

  if (in_range.empty()) {
    row.outcome = RowOutcome::infeasible;
    const double mid = probit_simple(scn.with_pi_r(0.25), rule);
    row.note = mid < t ? "pev stays below the target across pi_r in (0,1)"
                       : "pev stays at or above the target across pi_r in (0,1)";
    return row;
  }

  // Prefer the root whose upper side is the robust one (PEV below target
  // for pi_r above the threshold), matching the reading "the observed part
  // must represent at least this share".
  auto upper_side_robust = [&](double u) {
    const double eps = std::min(1e-6, (1.0 - u * u) / 4.0);
    return probit_simple(scn.with_pi_r(u * u + eps), rule) < t;
  };

  double chosen = in_range.back();
  bool found = false;
  for (auto it = in_range.rbegin(); it != in_range.rend(); ++it) {
    if (upper_side_robust(*it)) {
      chosen = *it;
      found = true;
      break;
    }
  }
  row.outcome = RowOutcome::ok;
  row.threshold = chosen * chosen;
  row.delta_id = delta_distribution_pi(scn.with_pi_r(row.threshold)).mean;
  if (!found) row.note = "pev is below the target only for pi_r below this threshold";
  for (double u : in_range) {
    if (std::abs(u - chosen) < 1e-13) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "second root at pi_r = %.6f", u * u);
    row.note = row.note.empty() ? buf : row.note + "; " + buf;
  }
  return row;
}

ThresholdRow solve_n_un(double pev_target, const RegressionScenario& scn, const DecisionRule& rule,
                        const NUnSolveOptions& options) {
  check_target(pev_target);
  if (options.cap < 1) throw std::invalid_argument("solve_n_un: cap must be positive");

  const double t = normal::quantile(pev_target);
  const auto probit_at = [&](std::int64_t n) { return probit_pev_reg(scn, n, rule); };
  const auto delta_at = [&](std::int64_t n) { return delta_distribution_reg(scn, n).mean; };

  ThresholdRow row;
  row.pev_target = pev_target;

  // Probe monotonicity on a doubling grid before trusting a bisection.
  bool monotone = true;
  {
    double prev = probit_at(0);
    for (std::int64_t n = 1; n <= options.cap; n = n * 2) {
      const double cur = probit_at(std::min(n, options.cap));
      if (cur < prev - 1e-12) {
        monotone = false;
        break;
      }
      prev = cur;
      if (n >= options.cap) break;
    }
  }

  if (probit_at(0) >= t) {
    row.outcome = RowOutcome::infeasible;
    row.note = monotone ? "pev at n_un = 0 already reaches the target"
                        : "pev at n_un = 0 already reaches the target; probit not monotone";
    return row;
  }

  if (monotone) {
    if (probit_at(options.cap) < t) {
      row.outcome = RowOutcome::infeasible;
      char buf[96];
      std::snprintf(buf, sizeof buf, "pev stays below the target up to the cap n_un = %lld",
                    static_cast<long long>(options.cap));
      row.note = buf;
      return row;
    }
    // First n with probit >= t via doubling then bisection.
    std::int64_t lo = 0, hi = 1;
    while (hi < options.cap && probit_at(hi) < t) {
      lo = hi;
      hi = std::min(hi * 2, options.cap);
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      (probit_at(mid) < t ? lo : hi) = mid;
    }
    row.outcome = RowOutcome::ok;
    row.threshold = static_cast<double>(lo);
    row.delta_id = delta_at(lo);
    return row;
  }

  // Non-monotone: exhaustive scan, reporting every upward crossing and the
  // largest n that still keeps the PEV below the target.
  std::vector<std::int64_t> crossings;
  std::int64_t last_below = -1;
  double prev = probit_at(0);
  if (prev < t) last_below = 0;
  for (std::int64_t n = 1; n <= options.cap; ++n) {
    const double cur = probit_at(n);
    if (prev < t && cur >= t) crossings.push_back(n - 1);
    if (cur < t) last_below = n;
    prev = cur;
  }
  if (last_below < 0) {
    row.outcome = RowOutcome::infeasible;
    row.note = "probit not monotone; pev at or above the target for every scanned n_un";
    return row;
  }
  row.outcome = RowOutcome::ok;
  row.threshold = static_cast<double>(last_below);
  row.delta_id = delta_at(last_below);
  row.note = "probit not monotone; crossings at n_un =";
  for (std::int64_t c : crossings) row.note += " " + std::to_string(c);
  return row;
}

double solve_generic(const std::function<double(double)>& probit_fn, double pev_target, double lo,
                     double hi) {
  check_target(pev_target);
  if (!(lo < hi)) throw std::invalid_argument("solve_generic: need lo < hi");

  const double t = normal::quantile(pev_target);
  double flo = probit_fn(lo) - t;
  double fhi = probit_fn(hi) - t;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("solve_generic: bracket does not straddle the target probit");
  }

  const double tol = 1e-10 * std::max(1.0, std::abs(hi));
  double a = lo, b = hi;
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = probit_fn(mid) - t;
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      a = mid;
      flo = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

namespace {

ThresholdRow solve_custom(double target, const FocalParameter& focal, const Scenario& scn,
                          const DecisionRule& rule) {
  ThresholdRow row;
  row.pev_target = target;
  const auto fn = [&](double x) { return eval_focal(scn, rule, focal, x).probit; };
  try {
    const double x = solve_generic(fn, target, focal.lo, focal.hi);
    row.outcome = RowOutcome::ok;
    row.threshold = x;
    row.delta_id = eval_focal(scn, rule, focal, x).delta_id;
  } catch (const std::invalid_argument&) {
    row.outcome = RowOutcome::infeasible;
    row.note = "no crossing of the target pev inside the bracket";
  }
  return row;
}

}  // namespace

std::vector<ThresholdRow> sweep(const std::vector<double>& pev_targets,
                                const FocalParameter& focal, const Scenario& scn,
                                const DecisionRule& rule, const NUnSolveOptions& options) {
  std::vector<ThresholdRow> rows;
  rows.reserve(pev_targets.size());
  for (double target : pev_targets) {
    ThresholdRow row;
    row.pev_target = target;
    try {
      switch (focal.kind) {
        case FocalParameter::Kind::alpha:
          row = solve_alpha(target, std::get<SimpleScenario>(scn), rule);
          break;
        case FocalParameter::Kind::pi_r:
          row = solve_pi(target, std::get<SimpleScenario>(scn), rule);
          break;
        case FocalParameter::Kind::n_un:
          row = solve_n_un(target, std::get<RegressionScenario>(scn), rule, options);
          break;
        case FocalParameter::Kind::custom:
          row = solve_custom(target, focal, scn, rule);
          break;
      }
    } catch (const std::bad_variant_access&) {
      row.outcome = RowOutcome::error;
      row.note = "focal parameter does not apply to this estimator";
    } catch (const numeric_error& e) {
      row.outcome = RowOutcome::error;
      row.note = e.what();
    } catch (const std::invalid_argument& e) {
      row.outcome = RowOutcome::error;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

PevBound bound_pev(double lo, double hi, const FocalParameter& focal, const Scenario& scn,
                   const DecisionRule& rule) {
  if (!(lo <= hi)) throw std::invalid_argument("bound_pev: need lo <= hi");
  const bool integer_focal = focal.kind == FocalParameter::Kind::n_un;

  const auto at = [&](double x) {
    return eval_focal(scn, rule, focal, integer_focal ? std::round(x) : x);
  };

  // Degenerate interval: point evaluation twice over.
  if (lo == hi) {
    const FocalPoint p = at(lo);
    return PevBound{p.pev, p.pev, p.delta_id, p.delta_id, true};
  }

  const int probes = 33;
  std::vector<FocalPoint> pts;
  pts.reserve(probes);
  for (int i = 0; i < probes; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (probes - 1);
    pts.push_back(at(x));
  }

  bool nondecreasing = true, nonincreasing = true;
  for (int i = 1; i < probes; ++i) {
    if (pts[i].probit < pts[i - 1].probit - 1e-12) nondecreasing = false;
    if (pts[i].probit > pts[i - 1].probit + 1e-12) nonincreasing = false;
  }
  const bool monotone = nondecreasing || nonincreasing;

  PevBound out;
  out.monotone = monotone;
  if (monotone) {
    const FocalPoint& a = pts.front();
    const FocalPoint& b = pts.back();
    out.pev_lo = std::min(a.pev, b.pev);
    out.pev_hi = std::max(a.pev, b.pev);
    out.delta_lo = std::min(a.delta_id, b.delta_id);
    out.delta_hi = std::max(a.delta_id, b.delta_id);
    return out;
  }

  // Envelope over a dense grid (integer focals walk every integer when the
  // interval is small enough).
  const int grid = 1025;
  out.pev_lo = out.delta_lo = std::numeric_limits<double>::infinity();
  out.pev_hi = out.delta_hi = -std::numeric_limits<double>::infinity();
  if (integer_focal && hi - lo <= grid) {
    for (double x = std::ceil(lo); x <= hi; x += 1.0) {
      const FocalPoint p = at(x);
      out.pev_lo = std::min(out.pev_lo, p.pev);
      out.pev_hi = std::max(out.pev_hi, p.pev);
      out.delta_lo = std::min(out.delta_lo, p.delta_id);
      out.delta_hi = std::max(out.delta_hi, p.delta_id);
    }
    return out;
  }
  for (int i = 0; i < grid; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (grid - 1);
    const FocalPoint p = at(x);
    out.pev_lo = std::min(out.pev_lo, p.pev);
    out.pev_hi = std::max(out.pev_hi, p.pev);
    out.delta_lo = std::min(out.delta_lo, p.delta_id);
    out.delta_hi = std::max(out.delta_hi, p.delta_id);
  }
  return out;
}

}  // namespace pev
