#include <cmath>
#include <set>

#include "doctest.h"

#include "qsq/env.hpp"
#include "qsq/error.hpp"
#include "qsq/metrics.hpp"
#include "qsq/protocol.hpp"

using namespace qsq;

TEST_CASE("action table") {
  const auto& t = action_table();
  CHECK_FALSE(t[0].pulse.has_value());
  std::set<std::string> labels;
  int ry_half = 0;
  for (int a = 0; a < kNumActions; ++a) {
    labels.insert(t[a].label);
    if (is_ry_half_pi(a)) ++ry_half;
    if (a > 0) CHECK(t[a].pulse.has_value());
  }
  CHECK(labels.size() == kNumActions);
  CHECK(ry_half == 2);
}

TEST_CASE("episode bookkeeping and rewards") {
  EnvConfig cfg;
  SqueezeEnv env(cfg);
  const Observation o = env.reset();
  CHECK(o.mx == doctest::Approx(1.0));
  double prev = 1.0;
  int steps = 0;
  bool done = false;
  while (!done) {
    const StepResult r = env.step(0);
    ++steps;
    done = r.done;
    if (!env.episode().hit) {
      // Free QZE from CSS: reward is the log-improvement of xi2 minus nothing.
      CHECK(r.reward == doctest::Approx(std::log(prev) - std::log(r.report.xi2)).epsilon(1e-12));
    }
    if (r.report.mean_spin_defined) prev = r.report.xi2;
  }
  CHECK(steps == cfg.n_steps);
  CHECK_THROWS_AS(env.step(0), Error);
  CHECK_FALSE(env.episode().hit);  // OAT alone never reaches the TACT threshold
}

TEST_CASE("threshold hit pays the bonus and switches the curriculum") {
  EnvConfig cfg;
  cfg.xi2_ref_db = -1.0;  // reachable by free QZE
  SqueezeEnv env(cfg);
  env.reset();
  int k = 0;
  for (;; ++k) {
    const StepResult r = env.step(0);
    if (r.hit_now) {
      CHECK(r.reward == doctest::Approx(cfg.reward.zeta * std::exp(-cfg.reward.kappa * k)));
      break;
    }
    REQUIRE(k < cfg.n_steps);
  }
  CHECK(env.episode().k_star == k);
  const StepResult r = env.step(3);
  REQUIRE(r.report.readout_defined);
  CHECK(r.reward == doctest::Approx(-cfg.reward.alpha * std::log(r.report.xi2_y) - cfg.reward.action_cost));
}

TEST_CASE("discounted return") {
  const double r[] = {1.0, 2.0, 3.0};
  CHECK(cumulative_return(r, 0.5) == doctest::Approx(1.0 + 1.0 + 0.75));
}

TEST_CASE("invalid configurations") {
  EnvConfig cfg;
  cfg.n_steps = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = EnvConfig{};
  cfg.xi2_ref_db = 0.5;
  CHECK_THROWS_AS(validate(cfg), Error);
  SqueezeEnv env(EnvConfig{});
  env.reset();
  CHECK_THROWS_AS(env.step(kNumActions), Error);
}
