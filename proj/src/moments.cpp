#include "pev/moments.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "pev/errors.hpp"

namespace pev {

GroupMoments::GroupMoments(double mean_, double variance_, std::int64_t n_)
    : mean(mean_), variance(variance_), n(n_) {
  if (!std::isfinite(mean)) throw std::invalid_argument("GroupMoments: mean must be finite");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("GroupMoments: variance must be positive");
  }
  if (n < 0) throw std::invalid_argument("GroupMoments: n must be nonnegative");
}

MixFraction MixFraction::from_counts(std::int64_t n_un, std::int64_t n_ob) {
  if (n_un < 0 || n_ob < 0 || n_un + n_ob < 1) {
    throw std::invalid_argument("MixFraction: counts must be nonnegative with a positive total");
  }
  std::int64_t den = n_un + n_ob;
  return MixFraction(n_un, den, static_cast<double>(n_un) / static_cast<double>(den));
}

MixFraction MixFraction::from_value(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("MixFraction: lambda must lie in [0,1]");
  }
  return MixFraction(0, 0, lambda);
}

double MixFraction::value() const {
  return exact() ? static_cast<double>(num_) / static_cast<double>(den_) : value_;
}

MixFraction mix_fraction(std::int64_t n_un, std::int64_t n_ob) {
  if (n_ob < 1) throw std::invalid_argument("mix_fraction: n_ob must be at least 1");
  if (n_un < 0) throw std::invalid_argument("mix_fraction: n_un must be nonnegative");
  return MixFraction::from_counts(n_un, n_ob);
}

double pool_mean(double mean_un, std::int64_t n_un, double mean_ob, std::int64_t n_ob) {
  if (n_un < 0 || n_ob < 0) throw std::invalid_argument("pool_mean: counts must be nonnegative");
  std::int64_t total = n_un + n_ob;
  if (total < 1) throw std::invalid_argument("pool_mean: both sample sizes are zero");
  return (static_cast<double>(n_un) * mean_un + static_cast<double>(n_ob) * mean_ob) /
         static_cast<double>(total);
}

double pool_covariance(double cov_un, double cov_ob, double mean_a_un, double mean_a_ob,
                       double mean_b_un, double mean_b_ob, const MixFraction& lam) {
  const double da = mean_a_ob - mean_a_un;
  const double db = mean_b_ob - mean_b_un;
  if (lam.exact()) {
    const double num = static_cast<double>(lam.numerator());
    const double den = static_cast<double>(lam.denominator());
    return (num * cov_un + (den - num) * cov_ob) / den + (den - num) * num / (den * den) * da * db;
  }
  const double l = lam.value();
  return l * cov_un + (1.0 - l) * cov_ob + (1.0 - l) * l * da * db;
}

MultivariateMoments::MultivariateMoments(std::vector<Variable> variables, Eigen::VectorXd means,
                                         Eigen::MatrixXd cov, std::int64_t n,
                                         bool treatment_binary)
    : vars_(std::move(variables)),
      means_(std::move(means)),
      cov_(std::move(cov)),
      n_(n),
      treatment_binary_(treatment_binary) {
  validate();
}

void MultivariateMoments::validate() const {
  const auto d = static_cast<Eigen::Index>(vars_.size());
  if (d < 2) throw std::invalid_argument("MultivariateMoments: need at least outcome and treatment");
  if (means_.size() != d) throw std::invalid_argument("MultivariateMoments: means size mismatch");
  if (cov_.rows() != d || cov_.cols() != d) {
    throw std::invalid_argument("MultivariateMoments: cov must be square and match the variables");
  }
  if (n_ < 0) throw std::invalid_argument("MultivariateMoments: n must be nonnegative");

  int n_outcome = 0, n_treatment = 0;
  for (const auto& v : vars_) {
    if (v.role == VarRole::outcome) ++n_outcome;
    if (v.role == VarRole::treatment) ++n_treatment;
  }
  if (n_outcome != 1 || n_treatment != 1) {
    throw std::invalid_argument(
        "MultivariateMoments: exactly one outcome and one treatment variable required");
  }

  if (!means_.allFinite() || !cov_.allFinite()) {
    throw std::invalid_argument("MultivariateMoments: moments must be finite");
  }

  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double a = cov_(i, j), b = cov_(j, i);
      const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
      if (std::abs(a - b) > 1e-12 * scale) {
        throw std::invalid_argument("MultivariateMoments: cov is not symmetric");
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-10 * std::max(hi, 0.0)) {
    throw std::invalid_argument("MultivariateMoments: cov is not positive semidefinite");
  }

  if (treatment_binary_) {
    const double sww = cov_(treatment_index(), treatment_index());
    if (sww < -1e-12 || sww > 0.25 + 1e-12) {
      throw std::invalid_argument(
          "MultivariateMoments: binary treatment variance must lie in [0, 0.25]");
    }
  }
}

int MultivariateMoments::outcome_index() const {
  for (int i = 0; i < dim(); ++i) {
    if (vars_[static_cast<std::size_t>(i)].role == VarRole::outcome) return i;
  }
  return -1;
}

int MultivariateMoments::treatment_index() const {
  for (int i = 0; i < dim(); ++i) {
    if (vars_[static_cast<std::size_t>(i)].role == VarRole::treatment) return i;
  }
  return -1;
}

std::vector<int> MultivariateMoments::covariate_indices() const {
  std::vector<int> out;
  for (int i = 0; i < dim(); ++i) {
    if (vars_[static_cast<std::size_t>(i)].role == VarRole::covariate) out.push_back(i);
  }
  return out;
}

int MultivariateMoments::index_of(const std::string& name) const {
  for (int i = 0; i < dim(); ++i) {
    if (vars_[static_cast<std::size_t>(i)].name == name) return i;
  }
  return -1;
}

MultivariateMoments MultivariateMoments::with_n(std::int64_t n) const {
  return MultivariateMoments(vars_, means_, cov_, n, treatment_binary_);
}

MultivariateMoments MultivariateMoments::with_mean(int i, double value) const {
  Eigen::VectorXd m = means_;
  m(i) = value;
  return MultivariateMoments(vars_, std::move(m), cov_, n_, treatment_binary_);
}

MultivariateMoments MultivariateMoments::with_cov(int i, int j, double value) const {
  Eigen::MatrixXd c = cov_;
  c(i, j) = value;
  c(j, i) = value;
  return MultivariateMoments(vars_, means_, std::move(c), n_, treatment_binary_);
}

MultivariateMoments pool_multivariate(const MultivariateMoments& un,
                                      const MultivariateMoments& ob) {
  if (un.variables() != ob.variables()) {
    throw std::invalid_argument("pool_multivariate: variable roles or ordering differ");
  }
  const std::int64_t total = un.n() + ob.n();
  if (total < 1) throw std::invalid_argument("pool_multivariate: both samples are empty");

  const auto lam = MixFraction::from_counts(un.n(), ob.n());
  const int d = un.dim();

  Eigen::VectorXd means(d);
  for (int i = 0; i < d; ++i) {
    means(i) = pool_mean(un.means()(i), un.n(), ob.means()(i), ob.n());
  }

  Eigen::MatrixXd cov(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double v = pool_covariance(un.cov()(i, j), ob.cov()(i, j), un.means()(i),
                                       ob.means()(i), un.means()(j), ob.means()(j), lam);
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }

  return MultivariateMoments(un.variables(), std::move(means), std::move(cov), total,
                             un.treatment_binary() && ob.treatment_binary());
}

MultivariateMoments from_raw(const Eigen::MatrixXd& data, std::vector<Variable> variables,
                             bool treatment_binary) {
  const auto n = data.rows();
  const auto d = static_cast<Eigen::Index>(variables.size());
  if (n < 1) throw std::invalid_argument("from_raw: need at least one observation");
  if (data.cols() != d) throw std::invalid_argument("from_raw: column count does not match variables");

  Eigen::VectorXd means = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - means.transpose();
  Eigen::MatrixXd cov = (centered.adjoint() * centered) / static_cast<double>(n);
  cov = ((cov + cov.transpose()) / 2.0).eval();

  if (treatment_binary) {
    Eigen::Index w = -1;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (variables[static_cast<std::size_t>(i)].role == VarRole::treatment) w = i;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      const double v = data(r, w);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("from_raw: treatment declared binary but takes values outside {0,1}");
      }
    }
  }

  return MultivariateMoments(std::move(variables), std::move(means), std::move(cov), n,
                             treatment_binary);
}

}  // namespace pev
