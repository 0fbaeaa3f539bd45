#include <cmath>
#include <numbers>

#include "doctest.h"

#include "qsq/error.hpp"
#include "qsq/metrics.hpp"
#include "qsq/metrology.hpp"
#include "qsq/protocol.hpp"

using namespace qsq;

namespace {

// d<f_y>/dphi at phi = 0 by first-order perturbation: each encoding step
// contributes the generator -i f_z / N_e inserted after its phase.
double analytic_slope(const SpinOps& ops, const QuditState& initial, const EncodingSpec& spec) {
  const int d = ops.spin.dim();
  std::vector<ComplexMatrix> steps;
  for (int k = 1; k <= spec.n_e; ++k) {
    ComplexMatrix u = ComplexMatrix::Identity(d, d);
    if (spec.protocol == EncodingProtocol::kRlStabilized) {
      u = rotation_unitary(ops, {Axis::kY, (k % 2 == 0 ? 1 : -1) * std::numbers::pi / 2});
    } else if (spec.protocol == EncodingProtocol::kRxDd && spec.rx.n[k - 1] != 0) {
      u = rotation_unitary(ops, {Axis::kX, spec.rx.beta(k - 1)});
    }
    ComplexMatrix q = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      const double m = ops.spin.m(i);
      q(i, i) = std::polar(1.0, -spec.chi_dt * m * m);
    }
    steps.push_back(q * u);
  }
  QuditState psi = initial;
  for (const auto& s : steps) psi = s * psi;
  const ComplexMatrix gen = Complex(0, -1.0 / spec.n_e) * ops.fz;
  ComplexVector dpsi = ComplexVector::Zero(d);
  for (int j = 0; j < spec.n_e; ++j) {
    QuditState part = initial;
    for (int k = 0; k < spec.n_e; ++k) {
      part = steps[k] * part;
      if (k == j) part = gen * part;
    }
    dpsi += part;
  }
  return 2.0 * psi.dot(ops.fy * dpsi).real();
}

}  // namespace

TEST_CASE("coherent probe without twisting sits at the SQL") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  EncodingSpec spec;
  spec.protocol = EncodingProtocol::kFreeQze;
  spec.n_e = 5;
  spec.chi_dt = 0.0;
  const PhaseEstimate e = phase_sensitivity(ops, css_x(ops), spec);
  CHECK(e.slope == doctest::Approx(10.5).epsilon(1e-8));
  CHECK(e.delta_phi == doctest::Approx(sql_phase(ops.spin)).epsilon(1e-8));
}

TEST_CASE("finite-difference slope matches the perturbative derivative") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  const QuditState probe = aligned_tact_state(ops);
  const double chi_dt = 0.314 / 70;
  for (EncodingProtocol p :
       {EncodingProtocol::kFreeQze, EncodingProtocol::kRlStabilized, EncodingProtocol::kRxDd}) {
    for (int n_e : {1, 4, 9}) {
      EncodingSpec spec;
      spec.protocol = p;
      spec.n_e = n_e;
      spec.chi_dt = chi_dt;
      for (int k = 0; k < n_e; ++k) spec.rx.n.push_back((5 * k + 3) % 17);
      const double exact = analytic_slope(ops, probe, spec);
      const PhaseEstimate e = phase_sensitivity_or_inf(ops, probe, spec);
      CHECK(std::abs(e.slope - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("vanishing derivative") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(3));
  EncodingSpec spec;
  spec.protocol = EncodingProtocol::kFreeQze;
  spec.n_e = 1;
  // |m=+f>_z has no transverse spin, so rotating about z changes nothing.
  const QuditState up = zeeman_state(ops, 1.5);
  CHECK_THROWS_AS(phase_sensitivity(ops, up, spec), Error);
  CHECK(std::isinf(phase_sensitivity_or_inf(ops, up, spec).delta_phi));
}

TEST_CASE("field sensitivity formulas") {
  const FieldParams f;
  CHECK(f.omega_l() == doctest::Approx(f.gamma * f.b0));
  const SpinQuantum s = SpinQuantum::from_twice(21);
  // SQL probe with no preparation time reproduces the field SQL.
  const double t = 0.02;
  CHECK(field_sensitivity(sql_phase(s), 0.0, t, f) == doctest::Approx(sql_field(s, t, f)));
  CHECK_THROWS_AS(field_sensitivity(1.0, 0.0, 0.0, f), Error);
}

TEST_CASE("encoding protocols parse") {
  for (auto p : {EncodingProtocol::kRlStabilized, EncodingProtocol::kFreeQze, EncodingProtocol::kRxDd}) {
    CHECK(parse_encoding_protocol(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_encoding_protocol("tact"), Error);
}

TEST_CASE("SQL crossings interpolate") {
  std::vector<PhaseSweepRow> rows = {{1, 0.01, 0, 2.0}, {2, 0.02, 0, 1.0}, {3, 0.03, 0, -1.0}};
  CHECK(*sql_crossing_down(rows) == doctest::Approx(0.025));
  std::vector<FieldSweepRow> f(3);
  f[0].t_tot = 1;
  f[0].sql_ratio_db = -2;
  f[1].t_tot = 2;
  f[1].sql_ratio_db = -1;
  f[2].t_tot = 3;
  f[2].sql_ratio_db = 1;
  CHECK(*sql_crossing_up(f) == doctest::Approx(2.5));
  rows[2].gain_db = 0.5;
  CHECK_FALSE(sql_crossing_down(rows).has_value());
}

TEST_CASE("field sweep horizon bookkeeping") {
  const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  FieldSweepOptions o;
  o.t_p = 1e-3;
  o.dt = 1e-4;
  o.t_tot = {1.05e-3, 2.0e-3, 2.01e-3};
  const auto rows = field_sweep(ops, css_x(ops), EncodingProtocol::kFreeQze, FieldParams{}, o);
  CHECK(rows[0].n_e == 1);
  CHECK(rows[1].n_e == 10);
  CHECK(rows[2].n_e == 11);
  CHECK(rows[1].t_tot == doctest::Approx(2.0e-3));
}

TEST_CASE("rl probe is the state after the first R_y(+pi/2) following the hit") {
  std::vector<QuditState> states;
  for (int k = 0; k < 6; ++k) states.push_back(QuditState::Constant(2, Complex(k, 0)));
  const std::vector<int> actions = {0, 0, 8, 7, 8, 7};
  const RlProbe p = rl_probe(states, actions, 1);
  CHECK(p.steps == 4);
  CHECK(p.state(0).real() == 3.0);
  CHECK_THROWS_AS(rl_probe(states, actions, -1), Error);
}
