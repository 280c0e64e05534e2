#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "pev/normal.hpp"
#include "pev/simple.hpp"

using namespace pev;
using namespace pev::testing;

TEST_CASE("delta_distribution pools group moments") {
  SUBCASE("no unobserved sample: combined = observed") {
    const auto d = delta_distribution(trial_treated_ob(), trial_control_ob(),
                                      GroupMoments(0.0, 45.0, 0), GroupMoments(0.0, 45.0, 0));
    CHECK(d.mean == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(d.variance == doctest::Approx(45.0 / 27 + 45.0 / 22).epsilon(1e-14));
  }

  SUBCASE("pi_r = 0.46 realized with integer counts 46 observed / 54 unobserved") {
    const auto d = delta_distribution(GroupMoments(615.0, 45.0, 46), GroupMoments(607.0, 45.0, 46),
                                      GroupMoments(609.42, 45.0, 54), GroupMoments(611.5, 45.0, 54));
    CHECK(d.mean == doctest::Approx(2.5568).epsilon(1e-12));
    CHECK(close_abs(d.mean, 2.56, 0.01));
    CHECK(d.variance == doctest::Approx(45.0 / 100 + 45.0 / 100).epsilon(1e-14));
  }

  SUBCASE("identical arms give a null effect") {
    const auto g = GroupMoments(10.0, 4.0, 30);
    CHECK(delta_distribution(g, g, g, g).mean == 0.0);
  }

  SUBCASE("an arm with zero combined size is rejected") {
    CHECK_THROWS_AS(delta_distribution(GroupMoments(1, 1, 0), trial_control_ob(),
                                       GroupMoments(1, 1, 0), GroupMoments(1, 1, 5)),
                    std::invalid_argument);
  }
}

TEST_CASE("delta_distribution_pi") {
  SUBCASE("pi_r = 1 collapses to the observed difference") {
    CHECK(delta_distribution_pi(trial_simple(0.37, 1.0)).mean ==
          doctest::Approx(8.0).epsilon(1e-14));
  }

  SUBCASE("alpha = 1 scales the observed difference by pi_r") {
    CHECK(delta_distribution_pi(trial_simple(1.0, 0.46)).mean ==
          doctest::Approx(0.46 * 8.0).epsilon(1e-14));
  }

  SUBCASE("the worked threshold row") {
    const auto d = delta_distribution_pi(trial_simple(0.9966, 0.46));
    CHECK(d.mean == doctest::Approx(2.557286).epsilon(1e-10));
    CHECK(close_abs(d.mean, 2.56, 0.01));
    CHECK(d.variance == doctest::Approx(0.46 * (45.0 / 27 + 45.0 / 22)).epsilon(1e-14));
  }

  SUBCASE("scenario validation") {
    CHECK_THROWS_AS(trial_simple(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(trial_simple(1.0, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(SimpleScenario(trial_treated_ob(), trial_control_ob(), 0.0, 1.0, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("se_ideal_simple") {
  CHECK(se_ideal_simple(trial_simple(1.0, 1.0)) ==
        doctest::Approx(1.926686588971131).epsilon(1e-14));
  CHECK(se_ideal_simple(trial_simple(1.0, 0.25)) ==
        doctest::Approx(0.5 * 1.926686588971131).epsilon(1e-14));
  CHECK(se_ideal_simple(trial_simple(1.0, 0.46)) ==
        doctest::Approx(1.3067424220464252).epsilon(1e-12));
}

TEST_CASE("pev") {
  const auto positive = DecisionRule::statistical(Direction::positive, 1.96);

  SUBCASE("threshold at the mean gives one half") {
    const DeltaPosterior d(3.0, 4.0);
    CHECK(pev(d, DecisionRule::fixed_threshold(Direction::positive, 3.0)) == 0.5);
    CHECK(pev(d, DecisionRule::fixed_threshold(Direction::negative, 3.0)) == 0.5);
  }

  SUBCASE("the pi_r threshold row of the trial") {
    const auto scn = trial_simple(1.0, 0.2228);
    const double p = pev(delta_distribution_pi(scn), positive, se_ideal_simple(scn));
    CHECK(close_abs(p, 0.5, 0.002));
    CHECK(p == doctest::Approx(0.500035226017664).epsilon(1e-10));
  }

  SUBCASE("combined = observed sample") {
    const auto scn = trial_simple(1.0, 1.0);
    const double p = pev(delta_distribution_pi(scn), positive, se_ideal_simple(scn));
    CHECK(p == doctest::Approx(0.014182310498073843).epsilon(1e-10));
    CHECK(close_abs(p, 0.0142, 1e-4));
  }

  SUBCASE("statistical mode requires a usable se") {
    CHECK_THROWS_AS(pev(DeltaPosterior(0.0, 1.0), positive), std::invalid_argument);
    CHECK_THROWS_AS(pev(DeltaPosterior(0.0, 1.0), positive, -1.0), std::invalid_argument);
  }

  SUBCASE("output stays strictly inside (0,1) even for extreme inputs") {
    const DeltaPosterior far(1e9, 1.0);
    const double lo = pev(far, DecisionRule::fixed_threshold(Direction::positive, 0.0));
    const double hi = pev(far, DecisionRule::fixed_threshold(Direction::negative, 0.0));
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
  }
}

TEST_CASE("probit model coefficients for the trial") {
  const auto rule = DecisionRule::statistical(Direction::positive, 1.96);
  const auto model = probit_model_simple(trial_treated_ob(), trial_control_ob(), 611.5, rule);
  CHECK(model.c_alpha == doctest::Approx(317.3842614052485).epsilon(1e-12));
  CHECK(model.c_sqrt_pi == doctest::Approx(321.53646760515363).epsilon(1e-12));
  CHECK(model.c_inv_sqrt_pi == doctest::Approx(317.3842614052485).epsilon(1e-12));
  CHECK(model.intercept == 1.96);
  CHECK(close_abs(model.c_alpha, 317.38, 0.01));
  CHECK(close_abs(model.c_sqrt_pi, 321.54, 0.01));
}

TEST_CASE("probit_pev_statistical") {
  SUBCASE("alpha terms cancel at pi_r = 1") {
    const double expected = 1.96 - 8.0 / 1.926686588971131;
    for (double alpha : {0.3, 1.0, 2.9}) {
      CHECK(probit_pev_statistical(trial_simple(alpha, 1.0), Direction::positive, 1.96) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("the threshold row probit is nearly zero") {
    CHECK(close_abs(
        probit_pev_statistical(trial_simple(1.0, 0.2228), Direction::positive, 1.96), 0.0, 1e-3));
  }

  SUBCASE("strictly decreasing in alpha for a positive direction") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
      auto scn = random_simple(rng);
      if (scn.ybar_c_un < 0.0) scn = scn.with_ybar_c_un(-scn.ybar_c_un);
      if (scn.pi_r >= 1.0) scn = scn.with_pi_r(0.9);
      double prev = probit_pev_statistical(scn.with_alpha(0.5), Direction::positive);
      for (double a = 0.6; a <= 1.5; a += 0.1) {
        const double cur = probit_pev_statistical(scn.with_alpha(a), Direction::positive);
        CHECK(cur < prev);
        prev = cur;
      }
    }
  }
}

TEST_CASE("probit_pev_fixed") {
  SUBCASE("threshold at the combined mean gives probit zero") {
    const auto scn = trial_simple(0.99, 0.46);
    const double mean = delta_distribution_pi(scn).mean;
    CHECK(close_abs(probit_pev_fixed(scn, mean, Direction::positive), 0.0, 1e-11));
  }

  SUBCASE("statistical threshold passed as a fixed value") {
    const auto scn = trial_simple(1.0, 0.46);
    const double sharp = 1.96 * se_ideal_simple(scn);
    CHECK(probit_pev_fixed(scn, sharp, Direction::positive) ==
          doctest::Approx(-0.8561632605735204).epsilon(1e-10));
  }

  SUBCASE("round trip against the probability path") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 200; ++rep) {
      const auto scn = random_simple(rng);
      const double sharp = (static_cast<double>(rng() % 9) - 4.0) / 2.0;
      for (Direction dir : {Direction::positive, Direction::negative}) {
        const auto rule = DecisionRule::fixed_threshold(dir, sharp);
        const double direct = pev(delta_distribution_pi(scn), rule);
        const double via_probit = normal::cdf(probit_pev_fixed(scn, sharp, dir));
        CHECK(close_abs(via_probit, direct, 1e-9));
      }
    }
  }
}

TEST_CASE("statistical probit round trips through the probability path") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const auto scn = random_simple(rng);
    for (Direction dir : {Direction::positive, Direction::negative}) {
      const auto rule = DecisionRule::statistical(dir);
      const double direct = pev(delta_distribution_pi(scn), rule, se_ideal_simple(scn));
      const double probit = probit_pev_statistical(scn, dir);
      CHECK(close_abs(normal::cdf(probit), direct, 1e-9));
    }
  }
}

TEST_CASE("negative direction mirrors a sign-flipped scenario") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const auto scn = random_simple(rng);
    const SimpleScenario mirrored(
        GroupMoments(-scn.treated_observed.mean, scn.treated_observed.variance,
                     scn.treated_observed.n),
        GroupMoments(-scn.control_observed.mean, scn.control_observed.variance,
                     scn.control_observed.n),
        -scn.ybar_c_un, scn.alpha, scn.pi_r);
    const double sharp = 0.8;
    CHECK(close_abs(probit_pev_fixed(scn, sharp, Direction::positive),
                    probit_pev_fixed(mirrored, -sharp, Direction::negative), 1e-10));
    CHECK(close_abs(probit_pev_statistical(scn, Direction::positive),
                    probit_pev_statistical(mirrored, Direction::negative), 1e-10));
  }
}

TEST_CASE("posterior_bayes_simple") {
  SUBCASE("matches the pooled law on the worked example") {
    const auto d = posterior_bayes_simple(GroupMoments(609.42, 45.0, 54),
                                          GroupMoments(611.5, 45.0, 54),
                                          GroupMoments(615.0, 45.0, 46),
                                          GroupMoments(607.0, 45.0, 46));
    CHECK(d.mean == doctest::Approx(2.5568).epsilon(1e-12));
  }

  SUBCASE("equal sizes and identical means keep the common difference") {
    const auto d = posterior_bayes_simple(GroupMoments(5.0, 2.0, 10), GroupMoments(3.0, 2.0, 10),
                                          GroupMoments(5.0, 2.0, 10), GroupMoments(3.0, 2.0, 10));
    CHECK(d.mean == doctest::Approx(2.0).epsilon(1e-14));
  }

  SUBCASE("agrees with the direct pooled law everywhere") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> mean(-20.0, 20.0);
    std::uniform_real_distribution<double> var(0.25, 30.0);
    std::uniform_int_distribution<std::int64_t> n(1, 200);
    for (int rep = 0; rep < 100; ++rep) {
      const double vt = var(rng), vc = var(rng);
      const GroupMoments t_ob(mean(rng), vt, n(rng)), c_ob(mean(rng), vc, n(rng));
      const GroupMoments t_un(mean(rng), vt, n(rng)), c_un(mean(rng), vc, n(rng));
      const auto freq = delta_distribution(t_ob, c_ob, t_un, c_un);
      const auto bayes = posterior_bayes_simple(t_un, c_un, t_ob, c_ob);
      CHECK(close_rel(freq.mean, bayes.mean, 1e-10, 1e-12));
      CHECK(close_rel(freq.variance, bayes.variance, 1e-10));
    }
  }

  SUBCASE("an empty prior arm is rejected") {
    CHECK_THROWS_AS(posterior_bayes_simple(GroupMoments(1, 45, 0), GroupMoments(1, 45, 5),
                                           trial_treated_ob(), trial_control_ob()),
                    std::invalid_argument);
  }
}
