#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "pev/moments.hpp"
#include "pev/regression.hpp"
#include "pev/simple.hpp"

namespace pev::testing {

inline bool close_rel(double a, double b, double rtol, double atol = 0.0) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

inline bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Multisite reading-curriculum trial, group-mean-difference view:
// 27 treated classrooms at 615, 22 control classrooms at 607, known
// outcome variance 45 per arm, control mean 611.5 hypothesized for the
// unsampled schools.
inline GroupMoments trial_treated_ob() { return GroupMoments(615.0, 45.0, 27); }
inline GroupMoments trial_control_ob() { return GroupMoments(607.0, 45.0, 22); }

inline SimpleScenario trial_simple(double alpha, double pi_r) {
  return SimpleScenario(trial_treated_ob(), trial_control_ob(), 611.5, alpha, pi_r);
}

inline std::vector<Variable> trial_variables() {
  return {{"Y", VarRole::outcome}, {"W", VarRole::treatment}, {"Z", VarRole::covariate}};
}

// Same trial, regression view (pretest as the covariate). The outcome
// variance 2100 only participates in validity checks; no computed quantity
// reads it.
inline MultivariateMoments trial_observed_moments() {
  Eigen::VectorXd means(3);
  means << 609.96, 0.55, 576.62;
  Eigen::MatrixXd cov(3, 3);
  cov << 2100.0, 2.33, 1832.2,
         2.33, 0.25, 0.39,
         1832.2, 0.39, 2079.36;
  return MultivariateMoments(trial_variables(), means, cov, 49, true);
}

// Unobserved half of the thought experiment: identical to the observed
// moments except that treatment and outcome are uncorrelated.
inline MultivariateMoments trial_unobserved_moments(std::int64_t n_un = 0) {
  auto m = trial_observed_moments();
  return m.with_cov(m.treatment_index(), m.outcome_index(), 0.0).with_n(n_un);
}

inline RegressionScenario trial_regression() {
  return RegressionScenario(trial_observed_moments(), trial_unobserved_moments(), 32.0);
}

// Random raw data whose columns follow `vars`; entries are smooth functions
// of uniforms so moment matrices stay comfortably conditioned.
inline Eigen::MatrixXd random_raw(std::mt19937_64& rng, int n, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd data(n, d);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) data(r, c) = 3.0 * u(rng) + 0.5 * u(rng) * u(rng);
  }
  return data;
}

inline std::vector<Variable> generic_variables(int p) {
  std::vector<Variable> vars{{"Y", VarRole::outcome}, {"W", VarRole::treatment}};
  for (int i = 0; i < p; ++i) vars.push_back({"Z" + std::to_string(i + 1), VarRole::covariate});
  return vars;
}

// A random well-posed regression scenario built from two raw datasets, so
// every moment matrix is an honest sample covariance.
inline RegressionScenario random_regression(std::mt19937_64& rng, int p) {
  const int d = p + 2;
  std::uniform_int_distribution<int> size(d + 3, d + 40);
  const auto vars = generic_variables(p);
  const auto ob = from_raw(random_raw(rng, size(rng), d), vars);
  const auto un = from_raw(random_raw(rng, size(rng), d), vars);
  std::uniform_real_distribution<double> s2(0.5, 8.0);
  return RegressionScenario(ob, un, s2(rng));
}

inline SimpleScenario random_simple(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean(-30.0, 30.0);
  std::uniform_real_distribution<double> var(0.5, 60.0);
  std::uniform_int_distribution<std::int64_t> n(2, 150);
  std::uniform_real_distribution<double> pi(0.05, 1.0);
  std::uniform_real_distribution<double> alpha(0.8, 1.2);
  double ybar_c = mean(rng);
  if (std::abs(ybar_c) < 1.0) ybar_c += std::copysign(2.0, ybar_c == 0.0 ? 1.0 : ybar_c);
  return SimpleScenario(GroupMoments(mean(rng), var(rng), n(rng)),
                        GroupMoments(mean(rng), var(rng), n(rng)), ybar_c, alpha(rng), pi(rng));
}

}  // namespace pev::testing
