#include "qsq/spin.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace qsq {

SpinQuantum SpinQuantum::from_twice(int twice_f) {
  if (twice_f < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "spin must satisfy 2f >= 1, got 2f = " + std::to_string(twice_f));
  }
  return SpinQuantum(twice_f);
}

SpinQuantum SpinQuantum::from_value(double f) {
  const double twice = 2.0 * f;
  const double rounded = std::round(twice);
  if (!std::isfinite(f) || std::abs(twice - rounded) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "spin must be a half-integer, got " + std::to_string(f));
  }
  return from_twice(static_cast<int>(rounded));
}

std::string SpinQuantum::to_string() const {
  if (twice_f_ % 2 == 0) return std::to_string(twice_f_ / 2);
  return std::to_string(twice_f_) + "/2";
}

SpinQuantum parse_spin(std::string_view text) {
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    int num = 0;
    int den = 0;
    const auto* b = text.data();
    auto r1 = std::from_chars(b, b + slash, num);
    auto r2 = std::from_chars(b + slash + 1, b + text.size(), den);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != b + slash ||
        r2.ptr != b + text.size() || (den != 1 && den != 2)) {
      throw Error(ErrorCode::kInvalidArgument, "cannot parse spin '" + std::string(text) + "'");
    }
    return SpinQuantum::from_twice(den == 2 ? num : 2 * num);
  }
  try {
    std::size_t used = 0;
    const double value = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return SpinQuantum::from_value(value);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "cannot parse spin '" + std::string(text) + "'");
  }
}

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::kX: return "x";
    case Axis::kY: return "y";
    case Axis::kZ: return "z";
  }
  return "?";
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": dimension " +
                                                   std::to_string(a) + " vs " +
                                                   std::to_string(b));
  }
}

namespace {

// Fix the global phase so the amplitude at the largest-|m| index with
// non-negligible weight is real positive.
void fix_phase(Eigen::Ref<ComplexVector> v) {
  const Eigen::Index d = v.size();
  Eigen::Index pivot = d - 1;
  for (Eigen::Index k = 0; k < d; ++k) {
    // visit indices in order of decreasing |m|: d-1, 0, d-2, 1, ...
    const Eigen::Index idx = (k % 2 == 0) ? d - 1 - k / 2 : k / 2;
    if (std::abs(v(idx)) > 1e-8) {
      pivot = idx;
      break;
    }
  }
  const Complex a = v(pivot);
  if (std::abs(a) > 0.0) v *= std::conj(a) / std::abs(a);
}

ComplexMatrix sorted_eigenbasis(const ComplexMatrix& op) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op);
  ComplexMatrix basis = solver.eigenvectors();  // ascending eigenvalues
  for (Eigen::Index c = 0; c < basis.cols(); ++c) fix_phase(basis.col(c));
  return basis;
}

}  // namespace

SpinOps build_spin_ops(SpinQuantum spin) {
  const int d = spin.dim();
  const double f = spin.value();
  SpinOps ops;
  ops.spin = spin;
  ops.fz_diag.resize(d);
  ops.ladder.resize(d - 1);
  for (int i = 0; i < d; ++i) ops.fz_diag(i) = spin.m(i);
  for (int i = 0; i + 1 < d; ++i) {
    const double m = spin.m(i);
    ops.ladder(i) = std::sqrt(f * (f + 1.0) - m * (m + 1.0));
  }

  ComplexMatrix raise = ComplexMatrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) raise(i + 1, i) = ops.ladder(i);
  const ComplexMatrix lower = raise.adjoint();
  const Complex i_unit(0.0, 1.0);
  ops.fx = 0.5 * (raise + lower);
  ops.fy = (raise - lower) / (2.0 * i_unit);
  ops.fz = ops.fz_diag.cast<Complex>().asDiagonal();

  ops.fx_basis = sorted_eigenbasis(ops.fx);
  ops.fy_basis = sorted_eigenbasis(ops.fy);
  return ops;
}

ComplexMatrix axis_eigenbasis(const SpinOps& ops, Axis axis) {
  switch (axis) {
    case Axis::kX: return ops.fx_basis;
    case Axis::kY: return ops.fy_basis;
    case Axis::kZ: break;
  }
  return ComplexMatrix::Identity(ops.spin.dim(), ops.spin.dim());
}

ComplexMatrix rotation_unitary(const SpinOps& ops, const RotationPulse& pulse) {
  if (!std::isfinite(pulse.angle)) {
    throw Error(ErrorCode::kInvalidArgument, "rotation angle must be finite");
  }
  const Eigen::Index d = ops.spin.dim();
  ComplexVector phases(d);
  // The spectrum of every f_axis is exactly {-f, ..., f}.
  for (Eigen::Index i = 0; i < d; ++i) {
    phases(i) = std::polar(1.0, -pulse.angle * ops.fz_diag(i));
  }
  if (pulse.axis == Axis::kZ) return phases.asDiagonal();
  const ComplexMatrix& basis = pulse.axis == Axis::kX ? ops.fx_basis : ops.fy_basis;
  return basis * phases.asDiagonal() * basis.adjoint();
}

ComplexMatrix hermitian_exp(const ComplexMatrix& generator, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(generator);
  const Eigen::VectorXd& w = solver.eigenvalues();
  ComplexVector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -t * w(i));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

QuditState zeeman_state(const SpinOps& ops, double m) {
  const double index = m + ops.spin.value();
  const double rounded = std::round(index);
  if (std::abs(index - rounded) > 1e-9 || rounded < 0 || rounded >= ops.spin.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "m out of range: " + std::to_string(m));
  }
  QuditState state = QuditState::Zero(ops.spin.dim());
  state(static_cast<Eigen::Index>(rounded)) = 1.0;
  return state;
}

QuditState axis_state(const SpinOps& ops, Axis axis, double m) {
  const QuditState z = zeeman_state(ops, m);
  if (axis == Axis::kZ) return z;
  Eigen::Index idx = 0;
  z.cwiseAbs().maxCoeff(&idx);
  return axis == Axis::kX ? ops.fx_basis.col(idx) : ops.fy_basis.col(idx);
}

QuditState css_x(const SpinOps& ops) {
  return axis_state(ops, Axis::kX, ops.spin.value());
}

QuditState apply_spin(const SpinOps& ops, Axis axis, const QuditState& state) {
  const Eigen::Index d = ops.spin.dim();
  require_same_dim(state.size(), d, "apply_spin");
  if (axis == Axis::kZ) return ops.fz_diag.cast<Complex>().cwiseProduct(state);
  // f_+ |m_i> = ladder(i) |m_{i+1}>
  QuditState up = QuditState::Zero(d);
  QuditState down = QuditState::Zero(d);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    up(i + 1) = ops.ladder(i) * state(i);
    down(i) = ops.ladder(i) * state(i + 1);
  }
  if (axis == Axis::kX) return 0.5 * (up + down);
  return Complex(0.0, -0.5) * (up - down);
}

QzePropagator make_qze(const SpinOps& ops, double chi, double dt) {
  QzePropagator prop{chi, dt, ComplexVector(ops.spin.dim())};
  for (Eigen::Index i = 0; i < prop.phases.size(); ++i) {
    const double m = ops.fz_diag(i);
    prop.phases(i) = std::polar(1.0, -chi * dt * m * m);
  }
  return prop;
}

void apply_qze_inplace(QuditState& state, const QzePropagator& prop) {
  require_same_dim(state.size(), prop.phases.size(), "apply_qze");
  state.array() *= prop.phases.array();
}

QuditState apply_qze(const QuditState& state, const QzePropagator& prop) {
  QuditState out = state;
  apply_qze_inplace(out, prop);
  return out;
}

SpinMoments spin_moments(const SpinOps& ops, const QuditState& state) {
  const QuditState vx = apply_spin(ops, Axis::kX, state);
  const QuditState vy = apply_spin(ops, Axis::kY, state);
  const QuditState vz = apply_spin(ops, Axis::kZ, state);
  const QuditState* v[3] = {&vx, &vy, &vz};
  SpinMoments out;
  for (int a = 0; a < 3; ++a) {
    out.mean(a) = state.dot(*v[a]).real();
    for (int b = a; b < 3; ++b) {
      // (f_a psi)^dagger (f_b psi) = <f_a f_b>; its real part is the
      // symmetrized moment.
      out.second(a, b) = v[a]->dot(*v[b]).real();
      out.second(b, a) = out.second(a, b);
    }
  }
  return out;
}

}  // namespace qsq
