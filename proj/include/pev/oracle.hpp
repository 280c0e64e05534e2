#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "pev/decision.hpp"
#include "pev/moments.hpp"

namespace pev::oracle {

// Verification machinery used by the test suites. Nothing here sits on the
// analysis path; every routine gives an independent route to a quantity the
// closed forms compute directly.
//
// Randomness is reproducible across platforms: draws come from
// std::mt19937_64 seeded per shard with splitmix64(seed + 2*shard + 1), and
// normals are produced by the inverse-CDF transform through
// normal::quantile, never through implementation-defined distributions.

// Fraction of `draws` samples of N(mean, variance) landing on the
// fail-to-reject side of the threshold. Draws are consumed in fixed-size
// shards with independently seeded substreams, so the result depends only
// on (inputs, draws, seed).
double mc_pev(const DeltaPosterior& dist, const DecisionRule& rule, double se_ideal,
              std::int64_t draws, std::uint64_t seed);

// A raw n x d data matrix whose from_raw moments reproduce `target` to
// ~1e-9 entrywise: a deterministic zero-mean orthonormal base design is
// recolored with a symmetric square root of the target covariance
// (eigenvalues below 1e-10 of the spectral norm clipped to zero) and
// shifted to the target means. Requires n >= d + 1; rank-deficient targets
// are fine.
Eigen::MatrixXd synth_raw(const MultivariateMoments& target);

// Least-squares coefficients of the outcome on [1, covariates...,
// treatment], solved from the normal equations on the raw design. The
// returned order is [intercept, covariates..., treatment].
Eigen::VectorXd ols_oracle(const Eigen::MatrixXd& data, const std::vector<Variable>& variables);

}  // namespace pev::oracle
