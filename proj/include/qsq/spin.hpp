#ifndef QSQ_SPIN_HPP_
#define QSQ_SPIN_HPP_

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>

#include "qsq/error.hpp"

namespace qsq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Amplitudes over |f,m> ordered m = -f, ..., +f.
using QuditState = Eigen::VectorXcd;

// Spin quantum number stored as the integer 2f.
class SpinQuantum {
 public:
  static SpinQuantum from_twice(int twice_f);
  static SpinQuantum from_value(double f);

  int twice() const { return twice_f_; }
  double value() const { return 0.5 * twice_f_; }
  int dim() const { return twice_f_ + 1; }
  // Magnetic quantum number of basis index i.
  double m(int index) const { return -value() + index; }

  std::string to_string() const;

  friend bool operator==(SpinQuantum a, SpinQuantum b) {
    return a.twice_f_ == b.twice_f_;
  }

 private:
  explicit SpinQuantum(int twice_f) : twice_f_(twice_f) {}
  int twice_f_;
};

// Accepts "21/2", "10.5" or "3".
SpinQuantum parse_spin(std::string_view text);

enum class Axis { kX, kY, kZ };

std::string_view to_string(Axis axis);

struct RotationPulse {
  Axis axis = Axis::kY;
  double angle = 0.0;  // radians
};

struct SpinOps {
  SpinQuantum spin = SpinQuantum::from_twice(1);
  ComplexMatrix fx, fy, fz;
  Eigen::VectorXd fz_diag;  // m values
  Eigen::VectorXd ladder;   // <m+1|f_+|m>, length d-1
  // Eigenvectors of fx and fy as columns, eigenvalue m ascending.
  ComplexMatrix fx_basis, fy_basis;
};

SpinOps build_spin_ops(SpinQuantum spin);

// Columns are eigenvectors of f_axis for m = -f..f.
ComplexMatrix axis_eigenbasis(const SpinOps& ops, Axis axis);

// exp(-i angle f_axis), built from the cached eigenbasis.
ComplexMatrix rotation_unitary(const SpinOps& ops, const RotationPulse& pulse);

// exp(-i t G) for a Hermitian generator G.
ComplexMatrix hermitian_exp(const ComplexMatrix& generator, double t);

QuditState zeeman_state(const SpinOps& ops, double m);

// Eigenstate of f_axis with eigenvalue m; the amplitude of largest |m_z| is
// made real positive.
QuditState axis_state(const SpinOps& ops, Axis axis, double m);

// |f, m_x = f>.
QuditState css_x(const SpinOps& ops);

// f_axis |psi> using the tridiagonal ladder structure.
QuditState apply_spin(const SpinOps& ops, Axis axis, const QuditState& state);

struct QzePropagator {
  double chi = 0.0;  // rad/s
  double dt = 0.0;   // s
  ComplexVector phases;
};

QzePropagator make_qze(const SpinOps& ops, double chi, double dt);
void apply_qze_inplace(QuditState& state, const QzePropagator& prop);
QuditState apply_qze(const QuditState& state, const QzePropagator& prop);

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& op, double tol = 1e-10) {
  return op.rows() == op.cols() && (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// <psi|A|psi> for Hermitian A; an imaginary residue below 1e-10 is dropped.
template <typename Derived>
double expectation(const Eigen::MatrixBase<Derived>& op, const QuditState& state) {
  require_same_dim(op.cols(), state.size(), "expectation");
  if (!is_hermitian(op)) {
    throw Error(ErrorCode::kContractViolation, "expectation: operator is not Hermitian");
  }
  const Complex value = state.dot(op * state);
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw Error(ErrorCode::kContractViolation,
                "expectation: imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

// <A^2> - <A>^2 clamped at zero.
template <typename Derived>
double variance(const Eigen::MatrixBase<Derived>& op, const QuditState& state) {
  const double mean = expectation(op, state);
  const ComplexVector applied = op * state;
  const double second = applied.squaredNorm();
  const double var = second - mean * mean;
  return var < 0.0 ? 0.0 : var;
}

// First moments <f_a> and symmetrized second moments (1/2)<{f_a, f_b}>.
struct SpinMoments {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();

  Eigen::Matrix3d covariance() const { return second - mean * mean.transpose(); }
};

SpinMoments spin_moments(const SpinOps& ops, const QuditState& state);

}  // namespace qsq

#endif  // QSQ_SPIN_HPP_
