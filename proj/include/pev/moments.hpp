#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace pev {

// Summary statistics of one experimental arm (treated or control) in one
// sample. The variance is the known outcome variance, not an estimate.
struct GroupMoments {
  GroupMoments(double mean, double variance, std::int64_t n);

  double mean;
  double variance;
  std::int64_t n;
};

// The share lambda = n_un / (n_un + n_ob) of the unobserved sample in the
// combined sample. When built from counts the ratio is kept as an exact
// pair of integers so integer sweeps over n_un do not accumulate rounding.
class MixFraction {
 public:
  static MixFraction from_counts(std::int64_t n_un, std::int64_t n_ob);
  static MixFraction from_value(double lambda);

  double value() const;
  bool exact() const { return den_ > 0; }
  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

 private:
  MixFraction(std::int64_t num, std::int64_t den, double value)
      : num_(num), den_(den), value_(value) {}

  std::int64_t num_ = 0;
  std::int64_t den_ = 0;  // zero when constructed from a plain value
  double value_ = 0.0;
};

// lambda = n_un / (n_un + n_ob). Rejects n_ob = 0: a scenario with no
// observed sample has nothing to retest.
MixFraction mix_fraction(std::int64_t n_un, std::int64_t n_ob);

// Size-weighted average of two sample means.
double pool_mean(double mean_un, std::int64_t n_un, double mean_ob, std::int64_t n_ob);

// Combined-sample covariance of two samples from their per-sample
// covariances and means:
//   lambda*cov_un + (1-lambda)*cov_ob
//     + (1-lambda)*lambda*(mean_a_ob - mean_a_un)*(mean_b_ob - mean_b_un)
// Covariances use the population divisor n throughout.
double pool_covariance(double cov_un, double cov_ob, double mean_a_un, double mean_a_ob,
                       double mean_b_un, double mean_b_ob, const MixFraction& lam);

enum class VarRole { outcome, treatment, covariate };

struct Variable {
  std::string name;
  VarRole role;

  bool operator==(const Variable&) const = default;
};

// Means and population-divisor covariance matrix over (outcome, treatment
// indicator, covariates) for one sample, plus its size. Validated at
// construction: the matrix must be symmetric (1e-12 relative), positive
// semidefinite (eigenvalue floor -1e-10 times the largest eigenvalue), and
// when the treatment is declared binary its variance must sit in [0, 0.25].
// n = 0 marks an empty sample whose moments are placeholders for pooling.
class MultivariateMoments {
 public:
  MultivariateMoments(std::vector<Variable> variables, Eigen::VectorXd means,
                      Eigen::MatrixXd cov, std::int64_t n, bool treatment_binary = false);

  const std::vector<Variable>& variables() const { return vars_; }
  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  std::int64_t n() const { return n_; }
  bool treatment_binary() const { return treatment_binary_; }

  int dim() const { return static_cast<int>(vars_.size()); }
  int outcome_index() const;
  int treatment_index() const;
  std::vector<int> covariate_indices() const;
  int index_of(const std::string& name) const;  // -1 when absent

  MultivariateMoments with_n(std::int64_t n) const;
  MultivariateMoments with_mean(int i, double value) const;
  MultivariateMoments with_cov(int i, int j, double value) const;  // keeps symmetry

 private:
  void validate() const;

  std::vector<Variable> vars_;
  Eigen::VectorXd means_;
  Eigen::MatrixXd cov_;
  std::int64_t n_;
  bool treatment_binary_;
};

// Combined-sample moments of the unobserved and observed samples. Both
// inputs must declare identical variables in identical order.
MultivariateMoments pool_multivariate(const MultivariateMoments& un,
                                      const MultivariateMoments& ob);

// Moments of a raw n x (p+2) data matrix (rows are observations, columns
// follow `variables`). Covariances use divisor n.
MultivariateMoments from_raw(const Eigen::MatrixXd& data, std::vector<Variable> variables,
                             bool treatment_binary = false);

}  // namespace pev
