#include "pev/simple.hpp"

#include <cmath>
#include <stdexcept>

namespace pev {

namespace {
// Standard error of the observed-sample mean difference (the pi_r = 1 case).
double se_observed(const GroupMoments& t, const GroupMoments& c) {
  if (t.n < 1 || c.n < 1) {
    throw std::invalid_argument("simple estimator: both observed arms must be nonempty");
  }
  return std::sqrt(t.variance / static_cast<double>(t.n) +
                   c.variance / static_cast<double>(c.n));
}
}  // namespace

SimpleScenario::SimpleScenario(GroupMoments treated_ob, GroupMoments control_ob, double ybar_c_un_,
                               double alpha_, double pi_r_)
    : treated_observed(treated_ob),
      control_observed(control_ob),
      ybar_c_un(ybar_c_un_),
      alpha(alpha_),
      pi_r(pi_r_) {
  if (treated_observed.n < 1 || control_observed.n < 1) {
    throw std::invalid_argument("SimpleScenario: observed arms must be nonempty");
  }
  if (!(pi_r > 0.0 && pi_r <= 1.0)) {
    throw std::invalid_argument("SimpleScenario: pi_r must lie in (0,1]");
  }
  if (ybar_c_un == 0.0 || !std::isfinite(ybar_c_un)) {
    throw std::invalid_argument(
        "SimpleScenario: ybar_c_un must be nonzero (alpha is a ratio to it); "
        "use delta_distribution with explicit group means otherwise");
  }
  if (!std::isfinite(alpha)) throw std::invalid_argument("SimpleScenario: alpha must be finite");
}

SimpleScenario SimpleScenario::with_alpha(double a) const {
  return SimpleScenario(treated_observed, control_observed, ybar_c_un, a, pi_r);
}

SimpleScenario SimpleScenario::with_pi_r(double p) const {
  return SimpleScenario(treated_observed, control_observed, ybar_c_un, alpha, p);
}

SimpleScenario SimpleScenario::with_ybar_c_un(double y) const {
  return SimpleScenario(treated_observed, control_observed, y, alpha, pi_r);
}

DeltaPosterior delta_distribution(const GroupMoments& treated_ob, const GroupMoments& control_ob,
                                  const GroupMoments& treated_un, const GroupMoments& control_un) {
  const std::int64_t nt = treated_ob.n + treated_un.n;
  const std::int64_t nc = control_ob.n + control_un.n;
  if (nt < 1 || nc < 1) {
    throw std::invalid_argument("delta_distribution: each arm needs a positive combined size");
  }
  const double theta_t = pool_mean(treated_un.mean, treated_un.n, treated_ob.mean, treated_ob.n);
  const double theta_c = pool_mean(control_un.mean, control_un.n, control_ob.mean, control_ob.n);
  const double phi_t = treated_ob.variance / static_cast<double>(nt);
  const double phi_c = control_ob.variance / static_cast<double>(nc);
  return DeltaPosterior(theta_t - theta_c, phi_t + phi_c);
}

DeltaPosterior delta_distribution_pi(const SimpleScenario& scn) {
  const double mean = (1.0 - scn.pi_r) * (scn.alpha - 1.0) * scn.ybar_c_un +
                      scn.pi_r * (scn.treated_observed.mean - scn.control_observed.mean);
  const double se1 = se_observed(scn.treated_observed, scn.control_observed);
  return DeltaPosterior(mean, scn.pi_r * se1 * se1);
}

double se_ideal_simple(const SimpleScenario& scn) {
  return std::sqrt(scn.pi_r) * se_observed(scn.treated_observed, scn.control_observed);
}

double SimpleProbitModel::evaluate(double alpha, double pi_r) const {
  if (!(pi_r > 0.0 && pi_r <= 1.0)) {
    throw std::invalid_argument("SimpleProbitModel: pi_r must lie in (0,1]");
  }
  const double sp = std::sqrt(pi_r);
  const double isp = 1.0 / sp;
  if (direction == Direction::positive) {
    return c_alpha * alpha * sp - c_alpha * alpha * isp - c_sqrt_pi * sp + c_inv_sqrt_pi * isp +
           intercept;
  }
  return c_alpha * alpha * isp + c_sqrt_pi * sp - c_alpha * alpha * sp - c_inv_sqrt_pi * isp +
         intercept;
}

SimpleProbitModel probit_model_simple(const GroupMoments& treated_ob,
                                      const GroupMoments& control_ob, double ybar_c_un,
                                      const DecisionRule& rule) {
  const double se1 = se_observed(treated_ob, control_ob);
  SimpleProbitModel m{};
  m.direction = rule.direction();
  m.c_alpha = ybar_c_un / se1;
  m.c_sqrt_pi = (treated_ob.mean - control_ob.mean + ybar_c_un) / se1;
  if (rule.is_statistical()) {
    m.c_inv_sqrt_pi = ybar_c_un / se1;
    m.intercept = rule.z();
  } else {
    m.c_inv_sqrt_pi = (ybar_c_un + rule.fixed_value()) / se1;
    m.intercept = 0.0;
  }
  return m;
}

double probit_pev_fixed(const SimpleScenario& scn, double delta_sharp, Direction direction) {
  const auto rule = DecisionRule::fixed_threshold(direction, delta_sharp);
  const auto model =
      probit_model_simple(scn.treated_observed, scn.control_observed, scn.ybar_c_un, rule);
  return model.evaluate(scn.alpha, scn.pi_r);
}

double probit_pev_statistical(const SimpleScenario& scn, Direction direction, double z) {
  const auto rule = DecisionRule::statistical(direction, z);
  const auto model =
      probit_model_simple(scn.treated_observed, scn.control_observed, scn.ybar_c_un, rule);
  return model.evaluate(scn.alpha, scn.pi_r);
}

DeltaPosterior posterior_bayes_simple(const GroupMoments& treated_prior_un,
                                      const GroupMoments& control_prior_un,
                                      const GroupMoments& treated_ob,
                                      const GroupMoments& control_ob) {
  if (treated_prior_un.n < 1 || control_prior_un.n < 1) {
    throw std::invalid_argument(
        "posterior_bayes_simple: prior needs n_un >= 1 in both arms; "
        "use delta_distribution for an empty unobserved sample");
  }
  // Each arm has a single known outcome variance shared by prior and
  // likelihood.
  if (treated_prior_un.variance != treated_ob.variance ||
      control_prior_un.variance != control_ob.variance) {
    throw std::invalid_argument(
        "posterior_bayes_simple: prior and observed variances must match per arm");
  }

  // Conjugate update of a normal mean with known variance. The prior for
  // each arm is N(ybar_un, sigma^2/n_un); the observed arm contributes a
  // likelihood with precision n_ob/sigma^2.
  const auto update = [](const GroupMoments& prior, const GroupMoments& ob) {
    const double prior_precision = static_cast<double>(prior.n) / prior.variance;
    const double data_precision = static_cast<double>(ob.n) / ob.variance;
    const double posterior_precision = prior_precision + data_precision;
    const double posterior_mean =
        (prior_precision * prior.mean + data_precision * ob.mean) / posterior_precision;
    return std::pair<double, double>{posterior_mean, 1.0 / posterior_precision};
  };

  const auto [mt, vt] = update(treated_prior_un, treated_ob);
  const auto [mc, vc] = update(control_prior_un, control_ob);
  return DeltaPosterior(mt - mc, vt + vc);
}

}  // namespace pev
