#include <cmath>
#include <numbers>

#include "doctest.h"

#include "qsq/error.hpp"
#include "qsq/metrics.hpp"
#include "qsq/spin.hpp"

using namespace qsq;

TEST_CASE("coherent states sit at the classical limit") {
  for (int twice : {2, 7, 21}) {
    const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(twice));
    const QuditState css = css_x(ops);
    CHECK(wineland_xi2(ops, css) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fixed_axis_xi2(ops, css) == doctest::Approx(1.0).epsilon(1e-10));
    // Rotations leave the Wineland parameter unchanged.
    const QuditState tilted = rotation_unitary(ops, {Axis::kY, 0.4}) * css;
    CHECK(wineland_xi2(ops, tilted) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("observation of CSS_x") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  const Observation o = observe(ops, css_x(ops));
  const double f = 10.5;
  CHECK(o.mx == doctest::Approx(1.0));
  CHECK(std::abs(o.my) < 1e-12);
  CHECK(std::abs(o.mz) < 1e-12);
  CHECK(o.mxx == doctest::Approx(1.0));
  CHECK(o.myy == doctest::Approx(0.5 / f));
}

TEST_CASE("squeezed fixed-axis parameter by hand") {
  // Two-level mixture check on a spin-1 state: a|+1>_x + b|-1>_x has <f_x> = |a|^2-|b|^2.
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(2));
  const QuditState up = axis_state(ops, Axis::kX, 1.0);
  const QuditState down = axis_state(ops, Axis::kX, -1.0);
  const double a = std::sqrt(0.8), b = std::sqrt(0.2);
  const QuditState s = a * up + b * down;
  const double mean_x = expectation(ops.fx, s);
  CHECK(mean_x == doctest::Approx(0.6));
  const double var_y = variance(ops.fy, s);
  CHECK(fixed_axis_xi2(ops, s) == doctest::Approx(2.0 * var_y / (mean_x * mean_x)));
}

TEST_CASE("undefined metrics are flagged") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(2));
  const QuditState m0 = zeeman_state(ops, 0.0);
  CHECK_THROWS_AS(wineland_xi2(ops, m0), Error);
  const SqueezingReport rep = squeezing_report(ops, m0);
  CHECK_FALSE(rep.mean_spin_defined);
  CHECK(std::isnan(rep.xi2));
  // Mean spin along z: Wineland defined, fixed-axis readout degenerate.
  const SqueezingReport up = squeezing_report(ops, zeeman_state(ops, 1.0));
  CHECK(up.mean_spin_defined);
  CHECK_FALSE(up.readout_defined);
}

TEST_CASE("decibel helpers") {
  CHECK(to_db(0.1) == doctest::Approx(-10.0));
  CHECK(from_db(to_db(0.37)) == doctest::Approx(0.37));
}

TEST_CASE("fidelity") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(3));
  const QuditState a = css_x(ops);
  CHECK(fidelity(a, a) == doctest::Approx(1.0));
  CHECK(fidelity(zeeman_state(ops, 1.5), zeeman_state(ops, -1.5)) == doctest::Approx(0.0));
}
