#include <doctest.h>

#include <cmath>

#include "appraisal/dynamics.hpp"
#include "appraisal/scenarios.hpp"

using namespace appraisal;

TEST_CASE("deterministic generator produces valid building blocks") {
  Rng rng(123);
  SUBCASE("derangements have no fixed points") {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 3 + trial % 5;
      const auto perm = random_derangement(n, rng);
      std::vector<bool> seen(n, false);
      for (int i = 0; i < n; ++i) {
        CHECK(perm[i] != i);
        seen[perm[i]] = true;
      }
      for (int i = 0; i < n; ++i) CHECK(seen[i]);
    }
  }
  SUBCASE("derangement mixtures are doubly stochastic with zero diagonal") {
    for (int trial = 0; trial < 100; ++trial) {
      const auto c = random_doubly_stochastic(3 + trial % 3, rng);
      CHECK(c.doubly_stochastic());
      CHECK(c.weights().diagonal().cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("interior points are strictly positive and sum to one") {
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_interior_point(4, rng);
      CHECK(x.minCoeff() > 0.0);
      CHECK(x.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("scenario generation is reproducible under a fixed seed") {
  const auto a = doubly_stochastic_scenario(4, 2, 77);
  const auto b = doubly_stochastic_scenario(4, 2, 77);
  CHECK(a.window == b.window);
  CHECK((a.x0.x - b.x0.x).lpNorm<Eigen::Infinity>() == 0.0);
  REQUIRE(a.schedule.pool_size() == b.schedule.pool_size());
  for (int k = 0; k < a.schedule.pool_size(); ++k) {
    CHECK((a.schedule.pool_matrix(k).weights() - b.schedule.pool_matrix(k).weights())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  for (int k = 0; k < a.schedule.segments_per_period(); ++k) {
    CHECK(a.schedule.segments()[k].tau == b.schedule.segments()[k].tau);
  }
  const auto c = doubly_stochastic_scenario(4, 2, 78);
  CHECK((a.x0.x - c.x0.x).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("every generated scenario passes its own declared checks") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = doubly_stochastic_scenario(3 + seed % 3, 1 + seed % 3, seed);
    CHECK(s.schedule.verify_doubly_stochastic() > 0.0);
    CHECK(s.schedule.verify_joint_connectivity(s.window));
  }
}

TEST_CASE("fig1: alternating pulls keep the state oscillating") {
  const auto s = fig1_scenario();
  SUBCASE("schedule shape") {
    CHECK(s.schedule.segments_per_period() == 2);
    CHECK(s.schedule.dwell_bounds().lower == 0.4);
    CHECK(s.schedule.dwell_bounds().upper == 0.4);
    CHECK_THROWS_AS((void)s.schedule.verify_doubly_stochastic(), NotDoublyStochastic);
    CHECK(s.schedule.verify_joint_connectivity(1));
  }
  SUBCASE("run") {
    IntegratorConfig cfg = default_config(s);
    cfg.horizon = 120.0;  // the oscillation is periodic well before the full horizon
    const auto [traj, verdict] = run_scenario(s, cfg);
    CHECK(verdict.satisfied);
    CHECK_FALSE(verdict.assumptions_met);
    CHECK_FALSE(verdict.certificate.has_value());
    CHECK(verdict.measured >= 1e-5);
  }
}

TEST_CASE("fig2: common left eigenvector pair stabilizes away from the vertices") {
  const auto s = fig2_scenario();
  SUBCASE("both matrices share the left eigenvector for eigenvalue one") {
    const Eigen::VectorXd v = demo_common_left_eigenvector();
    auto [a, b] = demo_common_eigenvector_pair();
    CHECK((v.transpose() * a.weights() - v.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((v.transpose() * b.weights() - v.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_FALSE(a.doubly_stochastic());
    CHECK_FALSE(b.doubly_stochastic());
  }
  SUBCASE("run") {
    const auto [traj, verdict] = run_scenario(s, default_config(s));
    CHECK(verdict.satisfied);
    CHECK_FALSE(verdict.assumptions_met);
    CHECK(traj.back().ext.l >= 0.01);
    // period-to-period displacement is the headline measurement
    CHECK(verdict.measured <= 1e-6);
  }
}

TEST_CASE("doubly stochastic scenarios converge to the democratic state") {
  const auto s = doubly_stochastic_scenario(4, 2, 5);
  const auto [traj, verdict] = run_scenario(s, default_config(s));
  CHECK(verdict.satisfied);
  CHECK(verdict.assumptions_met);
  CHECK(verdict.measured <= 1e-6);
  REQUIRE(verdict.certificate.has_value());
  REQUIRE(verdict.envelope.has_value());
  CHECK(verdict.envelope->max_violation <= 1e-8);
  CHECK(verdict.envelope->empirical_rate >= verdict.certificate->lambda);

  // spread is nonincreasing across samples
  double prev = traj.front().ext.v;
  for (const auto& sample : traj.samples()) {
    CHECK(sample.ext.v <= prev + 1e-8);
    prev = sample.ext.v;
  }
}

TEST_CASE("converge-to expectation checks against an explicit target") {
  const auto c2 = demo_row_stochastic();
  Eigen::VectorXd target(4);
  target << 0.0917, 0.211, 0.486, 0.211;
  Eigen::VectorXd x0(4);
  x0 << 0.4, 0.3, 0.2, 0.1;
  Scenario s{"fixed-chain",
             SwitchingSchedule::uniform_cycle({c2}, 0.4),
             simplex_state(x0, 0.0),
             1,
             200.0,
             ConvergeTo{target, 5e-3}};
  const auto [traj, verdict] = run_scenario(s, default_config(s));
  CHECK(verdict.satisfied);
  CHECK_FALSE(verdict.assumptions_met);  // the chain matrix is not doubly stochastic
}

TEST_CASE("positivity spreads before t_{(n-m)B} on generated schedules") {
  for (std::uint64_t seed = 21; seed < 24; ++seed) {
    const auto s = doubly_stochastic_scenario(4, 2, seed);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
    x0(0) = 0.6;
    x0(1) = 0.4;  // m = 2
    IntegratorConfig cfg = default_config(s);
    cfg.horizon = s.schedule.switch_time(2L * s.window) + 1.0;
    const auto traj = integrate(s.schedule, simplex_state(x0, 0.0), cfg);
    const auto t_pos = first_positivity_time(traj);
    REQUIRE(t_pos.has_value());
    CHECK(*t_pos <= s.schedule.switch_time(2L * s.window));
  }
}
