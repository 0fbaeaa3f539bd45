#include <cmath>
#include <limits>

#include "doctest.h"

#include "qsq/de.hpp"
#include "qsq/error.hpp"
#include "qsq/metrics.hpp"
#include "qsq/protocol.hpp"

using namespace qsq;

namespace {

const SpinOps& ops21() {
  static const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  return ops;
}

}  // namespace

TEST_CASE("schedule grid") {
  RxSchedule s{{0, 16, 8}};
  CHECK(s.beta(1) == doctest::Approx(std::numbers::pi / 3));
  CHECK(s.betas()[2] == doctest::Approx(std::numbers::pi / 6));
}

TEST_CASE("all-zero schedule is free QZE from the aligned state") {
  const SpinOps& ops = ops21();
  const double chi_dt = 0.314 / 70;
  const QuditState start = aligned_tact_state(ops);
  const RxContext ctx = RxContext::make(ops, start, chi_dt);
  const RxTrajectory tr = rx_rollout(ctx, RxSchedule{std::vector<int>(5, 0)});
  const QuditState direct = apply_qze(start, make_qze(ops, 1.0, 5 * chi_dt));
  CHECK(fidelity(tr.states.back(), direct) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(de_cost(ctx, RxSchedule{{0}}) == doctest::Approx(tr.xi2_y[0]));
}

TEST_CASE("without twisting rotations keep the Wineland parameter") {
  const SpinOps& ops = ops21();
  const QuditState start = aligned_tact_state(ops);
  const double xi2 = wineland_xi2(ops, start);
  const RxContext ctx = RxContext::make(ops, start, 0.0);
  for (double v : rx_rollout(ctx, RxSchedule{{3, 16, 0, 7}}).xi2) {
    CHECK(v == doctest::Approx(xi2).epsilon(1e-9));
  }
}

TEST_CASE("cost treats undefined readout as a fixed penalty") {
  RxTrajectory tr;
  tr.xi2_y = {0.5, NAN, 0.3};
  CHECK(de_cost(tr) == doctest::Approx((0.5 + kDegenerateStepCost + 0.3) / 3));
  tr.xi2_y = {0.4, 0.4};
  CHECK(de_cost(tr) == doctest::Approx(0.4));
}

TEST_CASE("DE finds the exhaustive optimum for two steps") {
  const SpinOps& ops = ops21();
  const RxContext ctx = RxContext::make(ops, aligned_tact_state(ops), 0.314 / 70 * 4);
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= RxSchedule::kMaxIndex; ++a) {
    for (int b = 0; b <= RxSchedule::kMaxIndex; ++b) {
      best = std::min(best, de_cost(ctx, RxSchedule{{a, b}}));
    }
  }
  DeConfig cfg;
  cfg.generations = 60;
  const DeResult r = de_optimize(cfg, ctx, 2);
  CHECK(r.best_cost == doctest::Approx(best).epsilon(1e-12));
  CHECK(de_cost(ctx, r.best) == doctest::Approx(r.best_cost).epsilon(1e-12));
  CHECK(r.convergence.size() == 60);
  for (std::size_t g = 1; g < r.convergence.size(); ++g) {
    CHECK(r.convergence[g] <= r.convergence[g - 1]);
  }
}

TEST_CASE("DE improves on the all-zero schedule and is reproducible") {
  const SpinOps& ops = ops21();
  const RxContext ctx = RxContext::make(ops, aligned_tact_state(ops), 0.314 / 70);
  DeConfig cfg;
  cfg.generations = 80;
  const DeResult a = de_optimize(cfg, ctx, 11);
  const DeResult b = de_optimize(cfg, ctx, 11);
  CHECK(a.best.n == b.best.n);
  CHECK(a.convergence == b.convergence);
  CHECK(a.best_cost < de_cost(ctx, RxSchedule{std::vector<int>(11, 0)}));
}

TEST_CASE("DE configuration is validated") {
  DeConfig c;
  c.population = 3;
  CHECK_THROWS_AS(validate(c), Error);
  c = DeConfig{};
  c.mutation = 0.0;
  CHECK_THROWS_AS(validate(c), Error);
  c = DeConfig{};
  c.crossover = 1.5;
  CHECK_THROWS_AS(validate(c), Error);
}
