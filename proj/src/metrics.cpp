#include "qsq/metrics.hpp"

#include <algorithm>
#include <string>

namespace qsq {

Observation observe(const SpinMoments& moments, SpinQuantum spin) {
  const double f = spin.value();
  Observation obs;
  obs.mx = moments.mean(0) / f;
  obs.my = moments.mean(1) / f;
  obs.mz = moments.mean(2) / f;
  obs.mxx = moments.second(0, 0) / (f * f);
  obs.myy = moments.second(1, 1) / (f * f);
  return obs;
}

Observation observe(const SpinOps& ops, const QuditState& state) {
  return observe(spin_moments(ops, state), ops.spin);
}

TransverseMinimum min_transverse_variance(const SpinMoments& moments, SpinQuantum spin) {
  const double norm = moments.mean.norm();
  if (!(norm > 1e-6 * spin.value())) {
    throw Error(ErrorCode::kMeanSpinUndefined,
                "mean spin vanishes (|<f>| = " + std::to_string(norm) + ")");
  }
  const Eigen::Vector3d n = moments.mean / norm;
  // Any orthonormal pair perpendicular to n.
  const Eigen::Vector3d helper =
      std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = n.cross(helper).normalized();
  const Eigen::Vector3d e2 = n.cross(e1);

  const Eigen::Matrix3d cov = moments.covariance();
  const double a = e1.dot(cov * e1);
  const double c = e2.dot(cov * e2);
  const double b = e1.dot(cov * e2);
  // Smaller eigenvalue of [[a, b], [b, c]].
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  TransverseMinimum out;
  out.variance = std::max(0.0, mean - radius);
  // Eigenvector of the smaller eigenvalue.
  Eigen::Vector2d v;
  if (radius < 1e-15) {
    v = Eigen::Vector2d::UnitX();
  } else if (std::abs(b) > std::abs(a - out.variance)) {
    v = Eigen::Vector2d(b, out.variance - a);
  } else {
    v = Eigen::Vector2d(out.variance - c, b);
  }
  v.normalize();
  out.direction = v(0) * e1 + v(1) * e2;
  return out;
}

double wineland_xi2(const SpinMoments& moments, SpinQuantum spin) {
  const TransverseMinimum tmin = min_transverse_variance(moments, spin);
  return 2.0 * spin.value() * tmin.variance / moments.mean.squaredNorm();
}

double wineland_xi2(const SpinOps& ops, const QuditState& state) {
  return wineland_xi2(spin_moments(ops, state), ops.spin);
}

double fixed_axis_xi2(const SpinMoments& moments, SpinQuantum spin) {
  const double mx = moments.mean(0);
  if (!(std::abs(mx) > 1e-6 * spin.value())) {
    throw Error(ErrorCode::kReadoutAxisDegenerate,
                "<f_x> vanishes (" + std::to_string(mx) + ")");
  }
  const double var_y = std::max(0.0, moments.second(1, 1) - moments.mean(1) * moments.mean(1));
  return 2.0 * spin.value() * var_y / (mx * mx);
}

double fixed_axis_xi2(const SpinOps& ops, const QuditState& state) {
  return fixed_axis_xi2(spin_moments(ops, state), ops.spin);
}

SqueezingReport squeezing_report(const SpinMoments& moments, SpinQuantum spin) {
  SqueezingReport report;
  report.mean_spin = moments.mean;
  if (moments.mean.norm() > 1e-6 * spin.value()) {
    report.mean_spin_defined = true;
    report.xi2 = wineland_xi2(moments, spin);
    report.xi2_db = to_db(report.xi2);
  }
  if (std::abs(moments.mean(0)) > 1e-6 * spin.value()) {
    report.readout_defined = true;
    report.xi2_y = fixed_axis_xi2(moments, spin);
    report.xi2_y_db = to_db(report.xi2_y);
  }
  return report;
}

SqueezingReport squeezing_report(const SpinOps& ops, const QuditState& state) {
  return squeezing_report(spin_moments(ops, state), ops.spin);
}

Eigen::VectorXd readout_distribution(const SpinOps& ops, const QuditState& state, Axis axis) {
  require_same_dim(state.size(), ops.spin.dim(), "readout_distribution");
  Eigen::VectorXd p;
  if (axis == Axis::kZ) {
    p = state.cwiseAbs2();
  } else {
    const ComplexMatrix& basis = axis == Axis::kX ? ops.fx_basis : ops.fy_basis;
    p = (basis.adjoint() * state).cwiseAbs2();
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::max(0.0, p(i));
  return p;
}

double fidelity(const QuditState& a, const QuditState& b) {
  require_same_dim(a.size(), b.size(), "fidelity");
  return std::min(1.0, std::norm(a.dot(b)));
}

}  // namespace qsq
