#include "pev/regression.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "pev/errors.hpp"

namespace pev {

namespace {

constexpr double kMaxCondition = 1e12;

// Moment blocks in the predictor ordering [covariates..., treatment].
struct Blocks {
  Eigen::MatrixXd szz;
  Eigen::VectorXd szw;
  Eigen::VectorXd szy;
  Eigen::VectorXd zbar;
  double sww = 0.0;
  double swy = 0.0;
  double wbar = 0.0;
  double ybar = 0.0;
  int p = 0;
};

Blocks split_blocks(const MultivariateMoments& m) {
  Blocks b;
  const int iy = m.outcome_index();
  const int iw = m.treatment_index();
  const auto iz = m.covariate_indices();
  b.p = static_cast<int>(iz.size());
  b.szz.resize(b.p, b.p);
  b.szw.resize(b.p);
  b.szy.resize(b.p);
  b.zbar.resize(b.p);
  for (int a = 0; a < b.p; ++a) {
    for (int c = 0; c < b.p; ++c) b.szz(a, c) = m.cov()(iz[a], iz[c]);
    b.szw(a) = m.cov()(iz[a], iw);
    b.szy(a) = m.cov()(iz[a], iy);
    b.zbar(a) = m.means()(iz[a]);
  }
  b.sww = m.cov()(iw, iw);
  b.swy = m.cov()(iw, iy);
  b.wbar = m.means()(iw);
  b.ybar = m.means()(iy);
  return b;
}

// Factor of S_ZZ with a condition check; shared by every solve against it.
Eigen::LDLT<Eigen::MatrixXd> factor_szz(const Eigen::MatrixXd& szz) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(szz, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw numeric_error("covariate moment matrix S_ZZ is singular or near-singular");
  }
  return szz.ldlt();
}

struct Adjusted {
  double schur;      // sww - S_WZ S_ZZ^-1 S_ZW
  double numerator;  // swy - S_WZ S_ZZ^-1 S_ZY
};

Adjusted adjust(const MultivariateMoments& m) {
  const Blocks b = split_blocks(m);
  if (b.p == 0) {
    if (!(b.sww > 0.0)) throw numeric_error("treatment variance must be positive");
    return {b.sww, b.swy};
  }
  const auto ldlt = factor_szz(b.szz);
  const Eigen::VectorXd zz_inv_zw = ldlt.solve(b.szw);
  const Eigen::VectorXd zz_inv_zy = ldlt.solve(b.szy);
  const double schur = b.sww - b.szw.dot(zz_inv_zw);
  if (!(schur > 0.0)) {
    throw numeric_error("treatment has no variation left after covariate adjustment");
  }
  return {schur, b.swy - b.szw.dot(zz_inv_zy)};
}

}  // namespace

RegressionScenario::RegressionScenario(MultivariateMoments observed_, MultivariateMoments unobserved_,
                                       double sigma2_)
    : observed(std::move(observed_)), unobserved(std::move(unobserved_)), sigma2(sigma2_) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("RegressionScenario: sigma2 must be positive");
  }
  if (observed.variables() != unobserved.variables()) {
    throw std::invalid_argument("RegressionScenario: observed and unobserved variables must match");
  }
  if (observed.n() < 1) {
    throw std::invalid_argument("RegressionScenario: observed sample must be nonempty");
  }
}

RegressionScenario RegressionScenario::with_unobserved(MultivariateMoments un) const {
  return RegressionScenario(observed, std::move(un), sigma2);
}

double schur_precision(const MultivariateMoments& m) { return adjust(m).schur; }

double beta_w_hat(const MultivariateMoments& m) {
  const Adjusted a = adjust(m);
  return a.numerator / a.schur;
}

DeltaPosterior delta_distribution_reg(const RegressionScenario& scn, std::int64_t n_un) {
  if (n_un < 0) throw std::invalid_argument("delta_distribution_reg: n_un must be nonnegative");
  const auto pooled = pool_multivariate(scn.unobserved.with_n(n_un), scn.observed);
  const Adjusted a = adjust(pooled);
  const double m = static_cast<double>(n_un + scn.observed.n());
  return DeltaPosterior(a.numerator / a.schur, scn.sigma2 / (m * a.schur));
}

double se_ideal_reg(const RegressionScenario& scn, std::int64_t n_un) {
  return delta_distribution_reg(scn, n_un).sd();
}

double probit_pev_reg(const RegressionScenario& scn, std::int64_t n_un, const DecisionRule& rule) {
  if (n_un < 0) throw std::invalid_argument("probit_pev_reg: n_un must be nonnegative");
  const auto pooled = pool_multivariate(scn.unobserved.with_n(n_un), scn.observed);
  const Adjusted a = adjust(pooled);
  const double m = static_cast<double>(n_un + scn.observed.n());
  const double scale = std::sqrt(m) / (std::sqrt(scn.sigma2) * std::sqrt(a.schur));

  if (rule.is_statistical()) {
    return rule.direction() == Direction::positive ? rule.z() - scale * a.numerator
                                                   : rule.z() + scale * a.numerator;
  }
  const double sharp = rule.fixed_value();
  return rule.direction() == Direction::positive ? scale * (sharp * a.schur - a.numerator)
                                                 : scale * (a.numerator - sharp * a.schur);
}

CoefficientPosterior::CoefficientPosterior(Eigen::VectorXd mean_, Eigen::MatrixXd covariance_,
                                           int w_index_)
    : mean(std::move(mean_)), covariance(std::move(covariance_)), w_index(w_index_) {
  if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size()) {
    throw std::invalid_argument("CoefficientPosterior: dimension mismatch");
  }
  if (w_index < 0 || w_index >= mean.size()) {
    throw std::invalid_argument("CoefficientPosterior: w_index out of range");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-10 * std::max(hi, 0.0)) {
    throw std::invalid_argument("CoefficientPosterior: covariance is not positive semidefinite");
  }
}

namespace {

// Cross products X'X and X'Y of one sample rebuilt from its moments, with
// the design ordered [1, covariates..., treatment].
void cross_products(const MultivariateMoments& m, std::int64_t n, Eigen::MatrixXd& xtx,
                    Eigen::VectorXd& xty) {
  const Blocks b = split_blocks(m);
  const int k = b.p + 2;
  const double dn = static_cast<double>(n);

  Eigen::VectorXd vbar(b.p + 1);
  vbar.head(b.p) = b.zbar;
  vbar(b.p) = b.wbar;

  Eigen::MatrixXd svv(b.p + 1, b.p + 1);
  svv.topLeftCorner(b.p, b.p) = b.szz;
  svv.topRightCorner(b.p, 1) = b.szw;
  svv.bottomLeftCorner(1, b.p) = b.szw.transpose();
  svv(b.p, b.p) = b.sww;

  Eigen::VectorXd svy(b.p + 1);
  svy.head(b.p) = b.szy;
  svy(b.p) = b.swy;

  xtx.resize(k, k);
  xtx(0, 0) = dn;
  xtx.block(0, 1, 1, b.p + 1) = dn * vbar.transpose();
  xtx.block(1, 0, b.p + 1, 1) = dn * vbar;
  xtx.block(1, 1, b.p + 1, b.p + 1) = dn * (svv + vbar * vbar.transpose());

  xty.resize(k);
  xty(0) = dn * b.ybar;
  xty.tail(b.p + 1) = dn * (svy + vbar * b.ybar);
}

}  // namespace

CoefficientPosterior posterior_bayes_reg(const RegressionScenario& scn, std::int64_t n_un) {
  const int p = static_cast<int>(scn.observed.covariate_indices().size());
  if (n_un < p + 2) {
    throw std::invalid_argument(
        "posterior_bayes_reg: n_un must be at least p + 2 so the prior cross-product is invertible");
  }

  Eigen::MatrixXd xtx_un, xtx_ob;
  Eigen::VectorXd xty_un, xty_ob;
  cross_products(scn.unobserved, n_un, xtx_un, xty_un);
  cross_products(scn.observed, scn.observed.n(), xtx_ob, xty_ob);

  const Eigen::MatrixXd a = xtx_un + xtx_ob;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw numeric_error("posterior_bayes_reg: combined cross-product matrix is singular");
  }

  const auto ldlt = a.ldlt();
  Eigen::VectorXd mean = ldlt.solve(xty_un + xty_ob);
  Eigen::MatrixXd cov =
      scn.sigma2 * ldlt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  cov = ((cov + cov.transpose()) / 2.0).eval();

  return CoefficientPosterior(std::move(mean), std::move(cov), p + 1);
}

double NUnProbitModel::evaluate(std::int64_t n_un) const {
  if (n_un < 0) throw std::invalid_argument("NUnProbitModel: n_un must be nonnegative");
  const double s = std::sqrt(static_cast<double>(n_un + n_ob));
  const double swing = -c_inv_sqrt_m / s + c_sqrt_m * s;
  return direction == Direction::positive ? intercept + swing : intercept - swing;
}

NUnProbitModel probit_model_n_un(const RegressionScenario& scn, const DecisionRule& rule) {
  const auto& ob = scn.observed;
  const auto& un = scn.unobserved;
  const int iw = ob.treatment_index();
  const int iy = ob.outcome_index();

  const auto near = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1.0});
  };
  for (int i = 0; i < ob.dim(); ++i) {
    if (!near(ob.means()(i), un.means()(i))) {
      throw std::invalid_argument(
          "probit_model_n_un: unobserved means must equal observed means for the reduced form");
    }
    for (int j = i; j < ob.dim(); ++j) {
      const bool is_wy = (i == std::min(iw, iy) && j == std::max(iw, iy));
      if (!is_wy && !near(ob.cov()(i, j), un.cov()(i, j))) {
        throw std::invalid_argument(
            "probit_model_n_un: unobserved second moments may differ from observed only in the "
            "treatment-outcome covariance");
      }
    }
  }

  const Adjusted a = adjust(ob);
  const double swy_ob = ob.cov()(iw, iy);
  const double swy_un = un.cov()(iw, iy);
  const double q = swy_ob - a.numerator;  // S_WZ S_ZZ^-1 S_ZY
  const double den = std::sqrt(scn.sigma2) * std::sqrt(a.schur);

  NUnProbitModel m{};
  m.direction = rule.direction();
  m.n_ob = ob.n();
  m.c_inv_sqrt_m = static_cast<double>(ob.n()) * (swy_ob - swy_un) / den;
  m.c_sqrt_m = (q - swy_un) / den;
  if (rule.is_statistical()) {
    m.intercept = rule.z();
  } else {
    m.intercept = 0.0;
    m.c_sqrt_m += rule.fixed_value() * std::sqrt(a.schur) / std::sqrt(scn.sigma2);
  }
  return m;
}

}  // namespace pev
