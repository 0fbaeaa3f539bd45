#include <cmath>
#include <numbers>

#include "doctest.h"

#include "qsq/metrics.hpp"
#include "qsq/protocol.hpp"

using namespace qsq;

TEST_CASE("OAT optimum for spin 21/2") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  const BenchmarkResult oat = oat_benchmark(ops, 1.0);
  CHECK(oat.xi2_db == doctest::Approx(-7.17).epsilon(0.05 / 7.17));
  CHECK(oat.chi_t > 0.05);
  CHECK(oat.chi_t < 0.3);
}

TEST_CASE("OAT squeezing of spin 1/2 is absent") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(1));
  CHECK(oat_benchmark(ops, 1.0, 200).xi2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("TACT normalizations give the same optimum") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  const BenchmarkResult half = tact_benchmark(ops, 1.0, 2000, TactNormalization::kHalfAnticommutator);
  const BenchmarkResult full = tact_benchmark(ops, 1.0, 2000, TactNormalization::kAnticommutator);
  CHECK(std::abs(half.xi2_db - full.xi2_db) < 1e-6);
  CHECK(half.chi_t == doctest::Approx(2.0 * full.chi_t).epsilon(1e-4));
  CHECK(half.xi2_db < -8.0);
}

TEST_CASE("golden section finds a parabola minimum") {
  const double x = golden_section_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, 0.0, 1.0, 1e-10);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("run_schedule with empty steps is free QZE") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(5));
  Schedule s;
  s.dt = 0.01;
  s.steps.assign(10, std::nullopt);
  const Trajectory tr = run_schedule(ops, css_x(ops), s);
  const QzePropagator qze = make_qze(ops, 1.0, 0.1);
  const QuditState direct = apply_qze(css_x(ops), qze);
  CHECK(fidelity(tr.states.back(), direct) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tr.times.back() == doctest::Approx(0.1));
}

TEST_CASE("aligned state has fixed-axis equal to Wineland squeezing") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  const BenchmarkResult tact = tact_benchmark(ops, 1.0);
  const Alignment al = align_to_y(ops, tact.state);
  CHECK(al.xi2_y == doctest::Approx(tact.xi2).epsilon(1e-6));
  CHECK(fixed_axis_xi2(ops, al.state) == doctest::Approx(tact.xi2).epsilon(1e-6));
}

TEST_CASE("fidelity curves start at one") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(5));
  const QuditState s = css_x(ops);
  const auto c = fidelity_curve(ops, s, FidelityGenerator::kFz2, {0.0, 0.1});
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] < 1.0);
}
