#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "helpers.hpp"
#include "pev/moments.hpp"

using namespace pev;
using namespace pev::testing;

TEST_CASE("mix_fraction") {
  CHECK(mix_fraction(0, 49).value() == 0.0);
  CHECK(mix_fraction(91, 49).value() == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(mix_fraction(49, 49).value() == 0.5);
  CHECK(mix_fraction(1, 3).value() == 0.25);
  CHECK_THROWS_AS(mix_fraction(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(mix_fraction(-1, 3), std::invalid_argument);
}

TEST_CASE("pool_mean") {
  // Treated arm of the trial at pi_r = 0.46 realized as 54 unobserved and
  // 46 observed units; pairing with controls pooled the same way gives the
  // combined effect 2.56.
  const double theta_t = pool_mean(609.42, 54, 615.0, 46);
  const double theta_c = pool_mean(611.5, 54, 607.0, 46);
  CHECK(theta_t == doctest::Approx(611.9868).epsilon(1e-12));
  CHECK(theta_t - theta_c == doctest::Approx(2.5568).epsilon(1e-10));
  CHECK(close_abs(theta_t - theta_c, 2.56, 0.01));

  CHECK(pool_mean(123.0, 0, 7.5, 12) == 7.5);
  CHECK(pool_mean(1.0, 1, 3.0, 1) == 2.0);
  CHECK_THROWS_AS(pool_mean(1.0, 0, 2.0, 0), std::invalid_argument);
}

TEST_CASE("pool_covariance") {
  const auto lam = mix_fraction(91, 49);
  CHECK(pool_covariance(0.0, 2.33, 1, 1, 2, 2, lam) == doctest::Approx(0.8155).epsilon(1e-12));

  // Homogeneous samples pool to themselves for any lambda.
  for (double l : {0.0, 0.3, 0.65, 1.0}) {
    CHECK(pool_covariance(1.7, 1.7, 4, 4, -2, -2, MixFraction::from_value(l)) ==
          doctest::Approx(1.7).epsilon(1e-15));
  }

  // Swapping the samples while replacing lambda by 1 - lambda is a no-op.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double cu = u(rng), co = u(rng), au = u(rng), ao = u(rng), bu = u(rng), bo = u(rng);
    const double l = 0.5 + u(rng) / 7.0;
    const double direct = pool_covariance(cu, co, au, ao, bu, bo, MixFraction::from_value(l));
    const double swapped =
        pool_covariance(co, cu, ao, au, bo, bu, MixFraction::from_value(1.0 - l));
    CHECK(close_rel(direct, swapped, 1e-12, 1e-12));
  }
}

TEST_CASE("from_raw uses the population divisor") {
  Eigen::MatrixXd data(2, 2);
  data << 0.0, 1.0,
          2.0, 0.0;
  const auto m = from_raw(data, {{"Y", VarRole::outcome}, {"W", VarRole::treatment}});
  CHECK(m.means()(0) == 1.0);
  CHECK(m.cov()(0, 0) == doctest::Approx(1.0).epsilon(1e-15));  // ((-1)^2 + 1^2)/2

  Eigen::MatrixXd constant(4, 2);
  constant.col(0).setConstant(3.5);
  constant.col(1) << 0, 1, 0, 1;
  const auto mc = from_raw(constant, {{"Y", VarRole::outcome}, {"W", VarRole::treatment}});
  CHECK(mc.cov()(0, 0) == 0.0);

  CHECK_THROWS_AS(from_raw(Eigen::MatrixXd(0, 2), trial_variables(), false),
                  std::invalid_argument);
}

TEST_CASE("from_raw matches a direct textbook recomputation") {
  std::mt19937_64 rng(11);
  const auto data = random_raw(rng, 5, 3);
  const auto m = from_raw(data, trial_variables());
  for (int a = 0; a < 3; ++a) {
    double mean = 0.0;
    for (int r = 0; r < 5; ++r) mean += data(r, a) / 5.0;
    CHECK(close_rel(m.means()(a), mean, 1e-14, 1e-14));
    for (int b = 0; b < 3; ++b) {
      double mb = 0.0;
      for (int r = 0; r < 5; ++r) mb += data(r, b) / 5.0;
      double cov = 0.0;
      for (int r = 0; r < 5; ++r) cov += (data(r, a) - mean) * (data(r, b) - mb) / 5.0;
      CHECK(close_rel(m.cov()(a, b), cov, 1e-12, 1e-14));
    }
  }
}

TEST_CASE("moment validation") {
  Eigen::VectorXd means(2);
  means << 0.0, 0.5;
  Eigen::MatrixXd good(2, 2);
  good << 1.0, 0.1,
          0.1, 0.2;
  const std::vector<Variable> yv{{"Y", VarRole::outcome}, {"W", VarRole::treatment}};
  CHECK_NOTHROW(MultivariateMoments(yv, means, good, 10));

  Eigen::MatrixXd asym = good;
  asym(0, 1) = 0.2;
  CHECK_THROWS_AS(MultivariateMoments(yv, means, asym, 10), std::invalid_argument);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0,
                2.0, 1.0;
  CHECK_THROWS_AS(MultivariateMoments(yv, means, indefinite, 10), std::invalid_argument);

  Eigen::MatrixXd fat_w(2, 2);
  fat_w << 1.0, 0.0,
           0.0, 0.3;  // above the binary ceiling 0.25
  CHECK_THROWS_AS(MultivariateMoments(yv, means, fat_w, 10, true), std::invalid_argument);
  CHECK_NOTHROW(MultivariateMoments(yv, means, fat_w, 10, false));

  CHECK_THROWS_AS(GroupMoments(1.0, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(GroupMoments(1.0, -2.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(GroupMoments(1.0, 1.0, -1), std::invalid_argument);
}

TEST_CASE("pool_multivariate basics") {
  const auto ob = trial_observed_moments();

  SUBCASE("empty unobserved sample returns the observed moments") {
    const auto pooled = pool_multivariate(trial_unobserved_moments(0), ob);
    CHECK(pooled.n() == 49);
    CHECK((pooled.cov() - ob.cov()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pooled.means() - ob.means()).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("treatment-outcome entry shrinks, everything else is unchanged") {
    const auto pooled = pool_multivariate(trial_unobserved_moments(91), ob);
    const int iw = pooled.treatment_index(), iy = pooled.outcome_index();
    CHECK(pooled.cov()(iw, iy) == doctest::Approx(0.8155).epsilon(1e-12));
    CHECK(pooled.cov()(iw, iw) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(pooled.cov()(iy, iy) == doctest::Approx(2100.0).epsilon(1e-14));
    CHECK(pooled.n() == 140);
  }

  SUBCASE("role mismatch is rejected") {
    auto flipped = trial_variables();
    std::swap(flipped[0], flipped[1]);
    const MultivariateMoments other(flipped, ob.means(), ob.cov(), 10);
    CHECK_THROWS_AS(pool_multivariate(other, ob), std::invalid_argument);
  }
}

TEST_CASE("pooling two raw samples equals the moments of their concatenation") {
  std::mt19937_64 rng(2024);
  const auto vars = generic_variables(2);
  for (int rep = 0; rep < 30; ++rep) {
    const int na = 4 + static_cast<int>(rng() % 20);
    const int nb = 4 + static_cast<int>(rng() % 20);
    const auto a = random_raw(rng, na, 4);
    const auto b = random_raw(rng, nb, 4);
    Eigen::MatrixXd ab(na + nb, 4);
    ab << a, b;

    const auto pooled = pool_multivariate(from_raw(a, vars), from_raw(b, vars));
    const auto direct = from_raw(ab, vars);
    for (int i = 0; i < 4; ++i) {
      CHECK(close_rel(pooled.means()(i), direct.means()(i), 1e-10, 1e-12));
      for (int j = 0; j < 4; ++j) {
        CHECK(close_rel(pooled.cov()(i, j), direct.cov()(i, j), 1e-10, 1e-12));
      }
    }
  }
}

TEST_CASE("lambda boundaries return the inputs exactly") {
  const auto ob = trial_observed_moments();
  const auto un = trial_unobserved_moments(49);

  const auto all_ob = pool_multivariate(un.with_n(0), ob);
  CHECK((all_ob.cov() - ob.cov()).cwiseAbs().maxCoeff() == 0.0);

  const auto all_un = pool_multivariate(un, ob.with_n(0));
  CHECK((all_un.cov() - un.cov()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((all_un.means() - un.means()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pooled covariance matrices stay positive semidefinite") {
  std::mt19937_64 rng(99);
  const auto vars = generic_variables(3);
  for (int rep = 0; rep < 40; ++rep) {
    const auto a = from_raw(random_raw(rng, 9 + static_cast<int>(rng() % 15), 5), vars);
    const auto b = from_raw(random_raw(rng, 9 + static_cast<int>(rng() % 15), 5), vars);
    const auto pooled = pool_multivariate(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pooled.cov(), Eigen::EigenvaluesOnly);
    const double floor = -1e-10 * es.eigenvalues().maxCoeff();
    CHECK(es.eigenvalues().minCoeff() >= floor);
  }
}
