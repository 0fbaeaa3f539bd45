#ifndef QSQ_PROTOCOL_HPP_
#define QSQ_PROTOCOL_HPP_

#include <optional>
#include <vector>

#include "qsq/metrics.hpp"
#include "qsq/spin.hpp"

namespace qsq {

// One control step: optional instantaneous pulse, then exp(-i chi dt fz^2).
struct Schedule {
  std::vector<std::optional<RotationPulse>> steps;
  double chi = 1.0;  // rad/s
  double dt = 0.0;   // s
};

struct Trajectory {
  std::vector<QuditState> states;         // after each step
  std::vector<SqueezingReport> reports;   // metrics of states[k]
  std::vector<double> times;              // chi * t after each step
};

Trajectory run_schedule(const SpinOps& ops, const QuditState& initial, const Schedule& schedule);

// Golden-section minimization of a unimodal function on [lo, hi]. Ties
// resolve towards the lower end.
template <typename Fn>
double golden_section_minimize(Fn&& fn, double lo, double hi, double tol) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return fc <= fd ? c : d;
}

struct BenchmarkResult {
  double chi_t = 0.0;  // dimensionless time of the minimum
  double t = 0.0;      // seconds
  double xi2 = 1.0;
  double xi2_db = 0.0;
  QuditState state;
};

// Minimum of the Wineland parameter under free QZE from CSS_x over
// chi t in (0, 0.5]; grid scan then golden-section refinement.
BenchmarkResult oat_benchmark(const SpinOps& ops, double chi, int resolution = 2000);

enum class TactNormalization {
  kHalfAnticommutator,  // chi (fy fz + fz fy) / 2
  kAnticommutator,      // chi (fy fz + fz fy)
};

// Twisting generator transverse to the x-polarized CSS.
ComplexMatrix tact_generator(const SpinOps& ops, TactNormalization norm);

BenchmarkResult tact_benchmark(const SpinOps& ops, double chi, int resolution = 2000,
                               TactNormalization norm = TactNormalization::kHalfAnticommutator);

// exp(-i chi dt fz^2) R_y(-pi/2) exp(-i chi dt fz^2) R_y(pi/2) |psi>.
QuditState toggling_cycle(const SpinOps& ops, const QuditState& state, double chi, double dt);

struct Alignment {
  double angle = 0.0;
  QuditState state;
  double xi2_y = 1.0;
};

// R_x angle in [-pi, pi] minimizing the fixed-axis parameter.
Alignment align_to_y(const SpinOps& ops, const QuditState& state);

enum class FidelityGenerator { kFy2, kFz2 };

// F(t) = |<ref| exp(-i chi t G) |ref>|^2 for each chi t in chi_times.
std::vector<double> fidelity_curve(const SpinOps& ops, const QuditState& reference,
                                   FidelityGenerator generator,
                                   const std::vector<double>& chi_times);

// Scripted two-stage protocol: three paired R_y(+-pi/2) placed by grid
// search, then R_x(pi/3), R_y(-pi/4) and alternating R_y(+-pi/2).
struct ScriptedProtocol {
  std::vector<int> prep_steps;        // step indices of the six R_y pulses
  int hit_step = -1;                  // first step with xi2 <= threshold
  int probe_step = -1;                // steps taken when the probe state is read
  Schedule schedule;                  // full episode
  Trajectory trajectory;
  double best_prep_xi2 = 1.0;         // min xi2 within the search horizon
};

struct ScriptedSearch {
  int n_steps = 70;
  double chi_total = 0.314;          // chi T of the episode
  int horizon = 35;                  // steps allowed for preparation
  int coarse_stride = 3;
  double threshold_xi2 = 0.0;        // switch to stabilization once reached
};

ScriptedProtocol scripted_protocol(const SpinOps& ops, const ScriptedSearch& search);

// Min xi2 within the first `horizon` steps for the given six R_y pulse
// positions (signs alternate starting with +pi/2).
double prep_min_xi2(const SpinOps& ops, const std::vector<int>& positions, int horizon,
                    double chi_dt);

}  // namespace qsq

#endif  // QSQ_PROTOCOL_HPP_
