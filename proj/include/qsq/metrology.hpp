#ifndef QSQ_METROLOGY_HPP_
#define QSQ_METROLOGY_HPP_

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qsq/de.hpp"
#include "qsq/spin.hpp"

namespace qsq {

struct FieldParams {
  double gamma = 2.0 * std::numbers::pi * 13.24e9;  // rad s^-1 T^-1
  double b0 = 50e-6;                                // T
  double chi = 2.0 * std::numbers::pi * 8.112;      // rad/s

  double omega_l() const { return gamma * b0; }

  friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

enum class EncodingProtocol { kRlStabilized, kFreeQze, kRxDd };

std::string to_string(EncodingProtocol p);
EncodingProtocol parse_encoding_protocol(const std::string& text);

struct EncodingSpec {
  EncodingProtocol protocol = EncodingProtocol::kRlStabilized;
  int n_e = 1;
  double chi_dt = 0.0;   // chi * dt per step (dimensionless)
  double phi = 0.0;      // encoded phase, spread evenly over n_e steps
  RxSchedule rx;         // rx-dd only; length n_e
};

// Per step: pulse (R_y((-1)^k pi/2) for k = 1.., R_x(beta_k), or none), then
// amplitude m picks up exp(-i (chi dt m^2 + phi m / n_e)).
QuditState encode(const SpinOps& ops, const QuditState& initial, const EncodingSpec& spec);

struct PhaseEstimate {
  double delta_phi = 0.0;   // +inf if the slope vanished
  double variance = 0.0;    // Var(f_y) at phi = 0
  double slope = 0.0;       // d<f_y>/dphi, central difference
};

inline constexpr double kPhaseStep = 1e-4;

// Error propagation at phi = 0. Throws kDerivativeVanished when
// |d<f_y>/dphi| < 1e-12.
PhaseEstimate phase_sensitivity(const SpinOps& ops, const QuditState& initial, EncodingSpec spec,
                                double h = kPhaseStep);
// Same, but returns delta_phi = +inf instead of throwing.
PhaseEstimate phase_sensitivity_or_inf(const SpinOps& ops, const QuditState& initial,
                                       EncodingSpec spec, double h = kPhaseStep);

double sql_phase(SpinQuantum spin);
// delta_phi sqrt(T_p + T_e) / (gamma T_e)
double field_sensitivity(double delta_phi, double t_p, double t_e, const FieldParams& field);
double sql_field(SpinQuantum spin, double t_tot, const FieldParams& field);

struct PhaseSweepRow {
  int n_e = 0;
  double chi_t = 0.0;
  double delta_phi = 0.0;
  double gain_db = 0.0;  // 10 log10(delta_phi_SQL / delta_phi)
};

struct PhaseSweepOptions {
  double chi_dt = 0.0;
  std::vector<int> n_e;
  DeConfig de;  // rx-dd: schedule optimized separately for every n_e
};

std::vector<PhaseSweepRow> phase_sweep(const SpinOps& ops, const QuditState& initial,
                                       EncodingProtocol protocol, const PhaseSweepOptions& options);

// First chi t at which the gain falls from >= 0 dB to < 0 dB (linear
// interpolation in dB between rows).
std::optional<double> sql_crossing_down(const std::vector<PhaseSweepRow>& rows);

struct FieldSweepRow {
  double t_tot = 0.0;  // s, = t_p + t_e
  double t_p = 0.0;
  double t_e = 0.0;
  int n_e = 0;
  double delta_phi = 0.0;
  double delta_b = 0.0;      // T / sqrt(Hz)
  double delta_b_sql = 0.0;
  double sql_ratio_db = 0.0;  // 10 log10(dB_SQL / dB)
};

struct FieldSweepOptions {
  double t_p = 0.0;  // preparation time, s
  double dt = 0.0;   // control step, s
  std::vector<double> t_tot;  // requested totals; n_e = max(1, ceil((T_tot - T_p)/dt))
  DeConfig de;
};

std::vector<FieldSweepRow> field_sweep(const SpinOps& ops, const QuditState& probe,
                                       EncodingProtocol protocol, const FieldParams& field,
                                       const FieldSweepOptions& options);

// First T_tot at which the SQL ratio rises from < 0 dB to >= 0 dB.
std::optional<double> sql_crossing_up(const std::vector<FieldSweepRow>& rows);

// Probe for the stabilized protocol taken from a recorded episode: the
// state right after the first post-hit R_y(+pi/2), so that encoding continues
// the alternation with R_y(-pi/2). Falls back to the step after the hit.
struct RlProbe {
  QuditState state;
  int steps = 0;  // control steps of preparation; T_p = steps dt
};

RlProbe rl_probe(const std::vector<QuditState>& states, const std::vector<int>& actions,
                 int k_star);

}  // namespace qsq

#endif  // QSQ_METROLOGY_HPP_
