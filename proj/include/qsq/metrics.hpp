#ifndef QSQ_METRICS_HPP_
#define QSQ_METRICS_HPP_

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "qsq/spin.hpp"

namespace qsq {

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

// Normalized low-order moments seen by the agent.
struct Observation {
  double mx = 0.0, my = 0.0, mz = 0.0;  // <f_a>/f
  double mxx = 0.0, myy = 0.0;          // <f_a^2>/f^2

  static constexpr int kSize = 5;
  std::array<double, kSize> as_array() const { return {mx, my, mz, mxx, myy}; }
};

Observation observe(const SpinOps& ops, const QuditState& state);
Observation observe(const SpinMoments& moments, SpinQuantum spin);

// Wineland and fixed-axis squeezing of one state. Undefined quantities are
// NaN with the matching flag cleared; use wineland_xi2 / fixed_axis_xi2 for
// the throwing variants.
struct SqueezingReport {
  double xi2 = NAN;
  double xi2_y = NAN;
  double xi2_db = NAN;
  double xi2_y_db = NAN;
  Eigen::Vector3d mean_spin = Eigen::Vector3d::Zero();
  bool mean_spin_defined = false;
  bool readout_defined = false;
};

SqueezingReport squeezing_report(const SpinMoments& moments, SpinQuantum spin);
SqueezingReport squeezing_report(const SpinOps& ops, const QuditState& state);

// 2f min_perp Var / |<f>|^2. Throws kMeanSpinUndefined when |<f>| <= 1e-6 f.
double wineland_xi2(const SpinMoments& moments, SpinQuantum spin);
double wineland_xi2(const SpinOps& ops, const QuditState& state);

// 2f Var(f_y) / <f_x>^2. Throws kReadoutAxisDegenerate when |<f_x>| <= 1e-6 f.
double fixed_axis_xi2(const SpinMoments& moments, SpinQuantum spin);
double fixed_axis_xi2(const SpinOps& ops, const QuditState& state);

// Minimal transverse variance and the direction (unit vector) attaining it.
struct TransverseMinimum {
  double variance = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();
};
TransverseMinimum min_transverse_variance(const SpinMoments& moments, SpinQuantum spin);

// P_m = |<m; axis|psi>|^2, m = -f..f.
Eigen::VectorXd readout_distribution(const SpinOps& ops, const QuditState& state,
                                     Axis axis = Axis::kY);

double fidelity(const QuditState& a, const QuditState& b);

}  // namespace qsq

#endif  // QSQ_METRICS_HPP_
