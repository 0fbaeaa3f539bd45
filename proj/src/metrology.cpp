#include "qsq/metrology.hpp"

#include <cmath>
#include <limits>

#include "qsq/error.hpp"
#include "qsq/metrics.hpp"

namespace qsq {

std::string to_string(EncodingProtocol p) {
  switch (p) {
    case EncodingProtocol::kRlStabilized: return "rl-stabilized";
    case EncodingProtocol::kFreeQze: return "free-qze";
    case EncodingProtocol::kRxDd: return "rx-dd";
  }
  return "?";
}

EncodingProtocol parse_encoding_protocol(const std::string& text) {
  if (text == "rl-stabilized") return EncodingProtocol::kRlStabilized;
  if (text == "free-qze") return EncodingProtocol::kFreeQze;
  if (text == "rx-dd") return EncodingProtocol::kRxDd;
  throw Error(ErrorCode::kInvalidArgument, "unknown encoding protocol '" + text + "'");
}

QuditState encode(const SpinOps& ops, const QuditState& initial, const EncodingSpec& spec) {
  require_same_dim(initial.size(), ops.spin.dim(), "encode");
  if (spec.n_e < 1) throw Error(ErrorCode::kInvalidArgument, "N_e must be >= 1");
  if (spec.protocol == EncodingProtocol::kRxDd &&
      static_cast<int>(spec.rx.n.size()) != spec.n_e) {
    throw Error(ErrorCode::kDimensionMismatch, "rx-dd schedule length differs from N_e");
  }
  const int d = ops.spin.dim();
  const double rate = spec.phi / spec.n_e;
  ComplexVector phases(d);
  for (int i = 0; i < d; ++i) {
    const double m = ops.spin.m(i);
    phases(i) = std::polar(1.0, -(spec.chi_dt * m * m + rate * m));
  }
  ComplexMatrix ry_plus, ry_minus;
  if (spec.protocol == EncodingProtocol::kRlStabilized) {
    ry_plus = rotation_unitary(ops, {Axis::kY, std::numbers::pi / 2});
    ry_minus = rotation_unitary(ops, {Axis::kY, -std::numbers::pi / 2});
  }
  QuditState psi = initial;
  for (int k = 1; k <= spec.n_e; ++k) {
    switch (spec.protocol) {
      case EncodingProtocol::kRlStabilized:
        psi = (k % 2 == 0 ? ry_plus : ry_minus) * psi;
        break;
      case EncodingProtocol::kRxDd:
        if (spec.rx.n[k - 1] != 0) {
          psi = rotation_unitary(ops, {Axis::kX, spec.rx.beta(k - 1)}) * psi;
        }
        break;
      case EncodingProtocol::kFreeQze:
        break;
    }
    psi = psi.cwiseProduct(phases);
  }
  return psi;
}

PhaseEstimate phase_sensitivity_or_inf(const SpinOps& ops, const QuditState& initial,
                                       EncodingSpec spec, double h) {
  spec.phi = 0.0;
  const QuditState center = encode(ops, initial, spec);
  spec.phi = h;
  const double up = expectation(ops.fy, encode(ops, initial, spec));
  spec.phi = -h;
  const double down = expectation(ops.fy, encode(ops, initial, spec));
  PhaseEstimate out;
  out.variance = variance(ops.fy, center);
  out.slope = (up - down) / (2.0 * h);
  out.delta_phi = std::abs(out.slope) < 1e-12 ? std::numeric_limits<double>::infinity()
                                              : std::sqrt(out.variance) / std::abs(out.slope);
  return out;
}

PhaseEstimate phase_sensitivity(const SpinOps& ops, const QuditState& initial, EncodingSpec spec,
                                double h) {
  const PhaseEstimate out = phase_sensitivity_or_inf(ops, initial, spec, h);
  if (std::isinf(out.delta_phi)) {
    throw Error(ErrorCode::kDerivativeVanished,
                "d<f_y>/dphi vanished (slope " + std::to_string(out.slope) + ", Var(f_y) " +
                    std::to_string(out.variance) + ", protocol " + to_string(spec.protocol) +
                    ", N_e " + std::to_string(spec.n_e) + ")");
  }
  return out;
}

double sql_phase(SpinQuantum spin) { return 1.0 / std::sqrt(2.0 * spin.value()); }

double field_sensitivity(double delta_phi, double t_p, double t_e, const FieldParams& field) {
  if (!(t_e > 0.0) || t_p < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "field_sensitivity needs T_e > 0 and T_p >= 0");
  }
  return delta_phi * std::sqrt(t_p + t_e) / (field.gamma * t_e);
}

double sql_field(SpinQuantum spin, double t_tot, const FieldParams& field) {
  if (!(t_tot > 0.0)) throw Error(ErrorCode::kInvalidArgument, "T_tot must be positive");
  return 1.0 / (field.gamma * std::sqrt(2.0 * spin.value() * t_tot));
}

namespace {

// Encoding spec for one horizon; rx-dd optimizes its own schedule.
EncodingSpec make_spec(const SpinOps& ops, const QuditState& initial, EncodingProtocol protocol,
                       int n_e, double chi_dt, const DeConfig& de) {
  EncodingSpec spec;
  spec.protocol = protocol;
  spec.n_e = n_e;
  spec.chi_dt = chi_dt;
  if (protocol == EncodingProtocol::kRxDd) {
    const RxContext ctx = RxContext::make(ops, initial, chi_dt);
    spec.rx = de_optimize(de, ctx, n_e).best;
  }
  return spec;
}

}  // namespace

std::vector<PhaseSweepRow> phase_sweep(const SpinOps& ops, const QuditState& initial,
                                       EncodingProtocol protocol,
                                       const PhaseSweepOptions& options) {
  const double sql = sql_phase(ops.spin);
  std::vector<PhaseSweepRow> rows;
  for (int n_e : options.n_e) {
    const EncodingSpec spec = make_spec(ops, initial, protocol, n_e, options.chi_dt, options.de);
    PhaseSweepRow row;
    row.n_e = n_e;
    row.chi_t = n_e * options.chi_dt;
    row.delta_phi = phase_sensitivity_or_inf(ops, initial, spec).delta_phi;
    row.gain_db = to_db(sql / row.delta_phi);
    rows.push_back(row);
  }
  return rows;
}

std::optional<double> sql_crossing_down(const std::vector<PhaseSweepRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    if (a.gain_db >= 0.0 && b.gain_db < 0.0) {
      if (!std::isfinite(b.gain_db)) return b.chi_t;
      return a.chi_t + (b.chi_t - a.chi_t) * a.gain_db / (a.gain_db - b.gain_db);
    }
  }
  return std::nullopt;
}

std::vector<FieldSweepRow> field_sweep(const SpinOps& ops, const QuditState& probe,
                                       EncodingProtocol protocol, const FieldParams& field,
                                       const FieldSweepOptions& options) {
  if (!(options.dt > 0.0) || options.t_p < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "field sweep needs dt > 0 and T_p >= 0");
  }
  const double chi_dt = field.chi * options.dt;
  std::vector<FieldSweepRow> rows;
  for (double requested : options.t_tot) {
    FieldSweepRow row;
    row.n_e = std::max(1, static_cast<int>(std::ceil((requested - options.t_p) / options.dt - 1e-9)));
    row.t_p = options.t_p;
    row.t_e = row.n_e * options.dt;
    row.t_tot = row.t_p + row.t_e;
    const EncodingSpec spec = make_spec(ops, probe, protocol, row.n_e, chi_dt, options.de);
    row.delta_phi = phase_sensitivity_or_inf(ops, probe, spec).delta_phi;
    row.delta_b = field_sensitivity(row.delta_phi, row.t_p, row.t_e, field);
    row.delta_b_sql = sql_field(ops.spin, row.t_tot, field);
    row.sql_ratio_db = to_db(row.delta_b_sql / row.delta_b);
    rows.push_back(row);
  }
  return rows;
}

std::optional<double> sql_crossing_up(const std::vector<FieldSweepRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    if (a.sql_ratio_db < 0.0 && b.sql_ratio_db >= 0.0) {
      if (!std::isfinite(a.sql_ratio_db)) return b.t_tot;
      return a.t_tot + (b.t_tot - a.t_tot) * (-a.sql_ratio_db) / (b.sql_ratio_db - a.sql_ratio_db);
    }
  }
  return std::nullopt;
}

RlProbe rl_probe(const std::vector<QuditState>& states, const std::vector<int>& actions,
                 int k_star) {
  if (states.size() != actions.size() || states.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "episode states and actions differ in length");
  }
  if (k_star < 0 || k_star >= static_cast<int>(states.size())) {
    throw Error(ErrorCode::kMissingPrerequisite, "episode never reached the squeezing threshold");
  }
  const int n = static_cast<int>(states.size());
  int last = std::min(k_star + 1, n - 1);
  for (int k = k_star + 1; k < n; ++k) {
    if (actions[k] == 7) {  // R_y(+pi/2)
      last = k;
      break;
    }
  }
  return {states[last], last + 1};
}

}  // namespace qsq
