#pragma once

#include "pev/decision.hpp"
#include "pev/moments.hpp"
#include "pev/normal.hpp"

namespace pev {

// Group-mean-difference setting parameterized by the relative size pi_r of
// the observed part of the target population and the ratio alpha of the
// unobserved treated mean to the unobserved control mean.
//
// pi_r = 1 is allowed (the combined sample is the observed sample); pi_r = 0
// is rejected. ybar_c_un = 0 is rejected because alpha would be undefined;
// supply group means to delta_distribution() directly in that case.
struct SimpleScenario {
  SimpleScenario(GroupMoments treated_ob, GroupMoments control_ob, double ybar_c_un,
                 double alpha, double pi_r);

  GroupMoments treated_observed;
  GroupMoments control_observed;
  double ybar_c_un;
  double alpha;
  double pi_r;

  double ybar_t_un() const { return alpha * ybar_c_un; }

  SimpleScenario with_alpha(double a) const;
  SimpleScenario with_pi_r(double p) const;
  SimpleScenario with_ybar_c_un(double y) const;
};

// Law of the true effect given the combined sample, from explicit group
// moments of both samples. Each arm needs a positive combined size.
DeltaPosterior delta_distribution(const GroupMoments& treated_ob, const GroupMoments& control_ob,
                                  const GroupMoments& treated_un, const GroupMoments& control_un);

// Same law under the pi_r parameterization:
//   mean = (1-pi_r)*(alpha-1)*ybar_c_un + pi_r*(ybar_t_ob - ybar_c_ob)
//   variance = pi_r*(var_t/n_t_ob + var_c/n_c_ob)
DeltaPosterior delta_distribution_pi(const SimpleScenario& scn);

// Standard error of the combined-sample mean difference,
// sqrt(pi_r*(var_t/n_t_ob + var_c/n_c_ob)).
double se_ideal_simple(const SimpleScenario& scn);

// Coefficients of probit(PEV) as a function of (alpha, pi_r), holding the
// observed moments and ybar_c_un fixed. For the positive direction with a
// fixed threshold the closed form reads
//   [ c_alpha*(alpha*sqrt(pi) - alpha/sqrt(pi))
//     - c_sqrt_pi*sqrt(pi) + c_inv_sqrt_pi/sqrt(pi) ] + intercept
// with c_alpha = ybar_c_un/se1, c_sqrt_pi = (ybar_t_ob - ybar_c_ob +
// ybar_c_un)/se1, c_inv_sqrt_pi = (ybar_c_un + delta#)/se1, intercept = 0,
// and se1 the pi_r = 1 standard error. The statistical threshold moves the
// delta# term into the intercept: c_inv_sqrt_pi = ybar_c_un/se1,
// intercept = z. The negative direction mirrors the bracket.
struct SimpleProbitModel {
  double c_alpha;
  double c_sqrt_pi;
  double c_inv_sqrt_pi;
  double intercept;
  Direction direction;

  double evaluate(double alpha, double pi_r) const;
};

SimpleProbitModel probit_model_simple(const GroupMoments& treated_ob,
                                      const GroupMoments& control_ob, double ybar_c_un,
                                      const DecisionRule& rule);

// probit(PEV) for a fixed threshold delta_sharp.
double probit_pev_fixed(const SimpleScenario& scn, double delta_sharp, Direction direction);

// probit(PEV) for the statistical threshold +/- z * se_ideal.
double probit_pev_statistical(const SimpleScenario& scn, Direction direction,
                              double z = normal::default_z());

// Conjugate-normal posterior of the effect: the unobserved sample acts as
// the prior (mean ybar_un, variance sigma^2/n_un per arm) and the observed
// sample as the likelihood. Numerically identical to delta_distribution on
// the same inputs. Requires n_un >= 1 in both arms.
DeltaPosterior posterior_bayes_simple(const GroupMoments& treated_prior_un,
                                      const GroupMoments& control_prior_un,
                                      const GroupMoments& treated_ob,
                                      const GroupMoments& control_ob);

}  // namespace pev
