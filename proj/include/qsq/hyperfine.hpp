#ifndef QSQ_HYPERFINE_HPP_
#define QSQ_HYPERFINE_HPP_

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "qsq/spin.hpp"

namespace qsq {

inline constexpr double kPlanck = 6.62607015e-34;  // J s

// How the electric-quadrupole operator is written.
enum class QuadrupoleForm {
  // 3/2 K (2K + 1 - i(i+1) - j(j+1)), K = i.j
  kAsWritten,
  // 3K^2 + 3/2 K - i(i+1) j(j+1)  (Casimir form)
  kCasimir,
};

std::string to_string(QuadrupoleForm form);
QuadrupoleForm parse_quadrupole_form(const std::string& text);

// Ground state of 161Dy by default. Energies in Hz.
struct AtomParams {
  SpinQuantum i = SpinQuantum::from_twice(5);
  SpinQuantum j = SpinQuantum::from_twice(16);
  double a_hz = -116.2322e6;
  double b_hz = 1091.5748e6;
  double g_j = 1.24159;
  double g_i = -0.192;  // mu_I / (I mu_N), mu_I = -0.480 mu_N
  double mu_b = 9.2740100783e-24;  // J/T
  double mu_n = 5.0507837461e-27;  // J/T
  QuadrupoleForm quadrupole = QuadrupoleForm::kAsWritten;

  friend bool operator==(const AtomParams&, const AtomParams&) = default;
};

void validate(const AtomParams& p);

// Product basis |m_i> (x) |m_j>, index = a (2j+1) + b, both ascending in m.
Eigen::MatrixXd build_hamiltonian(const AtomParams& p, double b_field);

// Coupled zero-field state |f, M> expanded on the product basis.
Eigen::VectorXd coupled_state(const AtomParams& p, SpinQuantum f, double m);

struct ManifoldLevel {
  double m = 0.0;
  double energy_hz = 0.0;
  double overlap = 0.0;  // |<f m (B=0) | eigenvector>|^2
};

struct ManifoldSpectrum {
  SpinQuantum f = SpinQuantum::from_twice(21);
  double b_field = 0.0;
  std::vector<ManifoldLevel> levels;  // m = -f..f
};

// Diagonalizes each total-M block and picks the eigenvector with the largest
// zero-field overlap with |f, M>. Throws kManifoldMixing below overlap 0.6
// and kInvalidArgument for an f outside |i-j|..i+j.
ManifoldSpectrum label_manifold(const AtomParams& p, double b_field, SpinQuantum f);

struct QuadraticFit {
  double offset_hz = 0.0;
  double omega_l = 0.0;  // rad/s
  double chi = 0.0;      // rad/s
  double residual_rms_hz = 0.0;
};

// Least squares E = c0 + (Omega_L m + chi m^2)/(2 pi). Throws kRankDeficient
// with fewer than three distinct m.
QuadraticFit fit_quadratic(const std::vector<double>& m, const std::vector<double>& energy_hz);
QuadraticFit fit_quadratic(const ManifoldSpectrum& spectrum);

struct HyperfineRow {
  double b_field = 0.0;
  QuadraticFit fit;
  double min_overlap = 0.0;
};

std::vector<HyperfineRow> hyperfine_sweep(const AtomParams& p, SpinQuantum f,
                                          const std::vector<double>& b_fields);

// Exponent of chi ~ B^p from a log-log least-squares fit.
double power_law_exponent(const std::vector<HyperfineRow>& rows);

}  // namespace qsq

#endif  // QSQ_HYPERFINE_HPP_
