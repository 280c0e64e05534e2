#include "pev/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "pev/errors.hpp"
#include "pev/normal.hpp"

namespace pev::oracle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Uniform in (0,1) from the engine's full 64-bit output.
double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr std::int64_t kShardSize = 1 << 16;

}  // namespace

double mc_pev(const DeltaPosterior& dist, const DecisionRule& rule, double se_ideal,
              std::int64_t draws, std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("mc_pev: draws must be positive");

  const double sharp = rule.delta_sharp(se_ideal);
  const double sd = dist.sd();
  const bool positive = rule.direction() == Direction::positive;

  std::int64_t invalidated = 0;
  const std::int64_t shards = (draws + kShardSize - 1) / kShardSize;
  for (std::int64_t shard = 0; shard < shards; ++shard) {
    std::mt19937_64 engine(splitmix64(seed + 2 * static_cast<std::uint64_t>(shard) + 1));
    const std::int64_t begin = shard * kShardSize;
    const std::int64_t end = std::min(begin + kShardSize, draws);
    for (std::int64_t i = begin; i < end; ++i) {
      const double delta = dist.mean + sd * normal::quantile(to_unit(engine()));
      if (positive ? delta < sharp : delta > sharp) ++invalidated;
    }
  }
  return static_cast<double>(invalidated) / static_cast<double>(draws);
}

Eigen::MatrixXd synth_raw(const MultivariateMoments& target) {
  const int d = target.dim();
  const auto n = static_cast<Eigen::Index>(target.n());
  if (n < d + 1) {
    throw std::invalid_argument("synth_raw: need n >= dim + 1 to realize arbitrary moments");
  }

  // Deterministic base design, centered so its columns live in the
  // orthogonal complement of the all-ones vector.
  std::mt19937_64 engine(splitmix64(0x5EEDBA5ED0C0FFEEULL));
  Eigen::MatrixXd g(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) g(r, c) = normal::quantile(to_unit(engine()));
  }
  g.rowwise() -= g.colwise().mean();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
  if (qr.rank() < d) throw numeric_error("synth_raw: base design lost rank");
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
  // Column pivoting permutes columns only; the span (and zero column means)
  // is what matters here.
  Eigen::MatrixXd base = std::sqrt(static_cast<double>(n)) * q;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(target.cov());
  Eigen::VectorXd lambda = es.eigenvalues();
  const double spectral = lambda.cwiseAbs().maxCoeff();
  for (int i = 0; i < d; ++i) {
    if (lambda(i) < -1e-10 * spectral) {
      throw std::invalid_argument("synth_raw: target covariance is not positive semidefinite");
    }
    lambda(i) = std::max(lambda(i), 0.0);
  }
  const Eigen::MatrixXd root =
      es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

  Eigen::MatrixXd data = base * root;
  data.rowwise() += target.means().transpose();
  return data;
}

Eigen::VectorXd ols_oracle(const Eigen::MatrixXd& data, const std::vector<Variable>& variables) {
  const auto n = data.rows();
  const auto d = static_cast<Eigen::Index>(variables.size());
  if (data.cols() != d) throw std::invalid_argument("ols_oracle: column/variable mismatch");

  int iy = -1, iw = -1;
  std::vector<int> iz;
  for (int i = 0; i < d; ++i) {
    switch (variables[static_cast<std::size_t>(i)].role) {
      case VarRole::outcome: iy = i; break;
      case VarRole::treatment: iw = i; break;
      case VarRole::covariate: iz.push_back(i); break;
    }
  }
  if (iy < 0 || iw < 0) throw std::invalid_argument("ols_oracle: need outcome and treatment");

  const auto p = static_cast<Eigen::Index>(iz.size());
  Eigen::MatrixXd x(n, p + 2);
  x.col(0).setOnes();
  for (Eigen::Index k = 0; k < p; ++k) x.col(1 + k) = data.col(iz[static_cast<std::size_t>(k)]);
  x.col(p + 1) = data.col(iw);
  const Eigen::VectorXd y = data.col(iy);

  const Eigen::MatrixXd xtx = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xtx, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || lo < 1e-12 * hi) throw numeric_error("ols_oracle: design is rank-deficient");

  return xtx.ldlt().solve(x.transpose() * y);
}

}  // namespace pev::oracle
