#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "pev/decision.hpp"
#include "pev/moments.hpp"

namespace pev {

// Covariate-adjusted setting: the effect is the treatment coefficient in
// the regression of the outcome on the treatment indicator and covariates,
// with known residual variance sigma2. The unobserved moments are the
// hypothesized half of the thought experiment; their n field is the
// default unobserved sample size for point evaluations.
struct RegressionScenario {
  RegressionScenario(MultivariateMoments observed, MultivariateMoments unobserved, double sigma2);

  MultivariateMoments observed;
  MultivariateMoments unobserved;
  double sigma2;

  RegressionScenario with_unobserved(MultivariateMoments un) const;
};

// Residual precision factor of the treatment column after projecting out
// the covariates: sww - S_WZ (S_ZZ)^-1 S_ZW. Fails when S_ZZ is singular
// (condition estimate above 1e12) or the result is not strictly positive.
double schur_precision(const MultivariateMoments& m);

// Treatment coefficient from summary moments:
//   (swy - S_WZ (S_ZZ)^-1 S_ZY) / schur_precision.
double beta_w_hat(const MultivariateMoments& m);

// Law of the treatment coefficient given the combined sample with n_un
// unobserved observations: mean beta_w_hat(pooled), variance
// sigma2 / ((n_un + n_ob) * schur_precision(pooled)).
DeltaPosterior delta_distribution_reg(const RegressionScenario& scn, std::int64_t n_un);

// Standard error of the combined-sample treatment coefficient.
double se_ideal_reg(const RegressionScenario& scn, std::int64_t n_un);

// probit(PEV) for the regression estimator, evaluated through the closed
// form in the pooled moments (not through Phi^-1 of the probability).
double probit_pev_reg(const RegressionScenario& scn, std::int64_t n_un, const DecisionRule& rule);

// Joint Gaussian posterior over all regression coefficients, ordered
// [intercept, covariates..., treatment].
struct CoefficientPosterior {
  CoefficientPosterior(Eigen::VectorXd mean, Eigen::MatrixXd covariance, int w_index);

  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int w_index;

  double w_mean() const { return mean(w_index); }
  double w_variance() const { return covariance(w_index, w_index); }
};

// Conjugate Bayesian route: the unobserved sample defines the prior
// N((Xu'Xu)^-1 Xu'Yu, sigma2 (Xu'Xu)^-1) and the observed sample the
// likelihood. Cross-product matrices are rebuilt from the summary moments.
// The treatment marginal matches delta_distribution_reg. Requires
// n_un >= p + 2 so the prior cross-product is invertible.
CoefficientPosterior posterior_bayes_reg(const RegressionScenario& scn, std::int64_t n_un);

// Display form of probit(PEV) as a function of the unobserved sample size
// for scenarios whose unobserved means and second moments equal the
// observed ones except possibly the treatment-outcome covariance. With
// m = n_un + n_ob the positive-direction statistical probit reduces to
//   intercept - c_inv_sqrt_m / sqrt(m) + c_sqrt_m * sqrt(m).
struct NUnProbitModel {
  double intercept;
  double c_inv_sqrt_m;
  double c_sqrt_m;
  Direction direction;
  std::int64_t n_ob;

  double evaluate(std::int64_t n_un) const;
};

NUnProbitModel probit_model_n_un(const RegressionScenario& scn, const DecisionRule& rule);

}  // namespace pev
