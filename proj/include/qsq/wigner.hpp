#ifndef QSQ_WIGNER_HPP_
#define QSQ_WIGNER_HPP_

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "qsq/spin.hpp"

namespace qsq {

// <j1 m1; j2 m2 | J M> in the Condon-Shortley convention. Arguments are
// half-integers; zero when the selection rules fail. Non-half-integer input
// throws kInvalidArgument.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

// Orthonormal Y_kq(theta, phi), Condon-Shortley phase.
std::complex<double> spherical_harmonic(int k, int q, double theta, double phi);

// Quadrature grid on the unit sphere. theta nodes carry weights that already
// include sin(theta) dtheta; phi is uniform.
struct SphereGrid {
  Eigen::VectorXd theta;
  Eigen::VectorXd theta_weight;
  Eigen::VectorXd phi;
  double phi_weight = 0.0;

  // Gauss-Legendre in cos(theta): exact for band limits below n_theta.
  static SphereGrid gauss_legendre(int n_theta, int n_phi);
  // Midpoint theta rule, handy for plotting.
  static SphereGrid uniform(int n_theta, int n_phi);
};

struct WignerMap {
  SphereGrid grid;
  Eigen::MatrixXd values;  // (theta index, phi index)

  // Sum of W over the grid with its quadrature weights.
  double sphere_integral() const;
};

// State multipoles rho_kq = Tr(rho T_kq^dagger), k = 0..2f, q = -k..k,
// stored at index k*k + (q + k).
std::vector<std::complex<double>> state_multipoles(SpinQuantum spin, const QuditState& state);

// W(theta, phi) = sqrt((2f+1)/4pi) sum_kq rho_kq Y_kq, normalized to unit
// sphere integral.
double wigner_value(SpinQuantum spin, const std::vector<std::complex<double>>& multipoles,
                    double theta, double phi);

WignerMap wigner_map(const SpinOps& ops, const QuditState& state, const SphereGrid& grid);

}  // namespace qsq

#endif  // QSQ_WIGNER_HPP_
