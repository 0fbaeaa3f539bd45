#include "qsq/wigner.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace qsq {

namespace {

constexpr int kMaxFactorial = 256;

const std::array<double, kMaxFactorial>& log_factorials() {
  static const std::array<double, kMaxFactorial> table = [] {
    std::array<double, kMaxFactorial> t{};
    t[0] = 0.0;
    for (int n = 1; n < kMaxFactorial; ++n) t[n] = t[n - 1] + std::log(static_cast<double>(n));
    return t;
  }();
  return table;
}

double log_fact(int n) { return log_factorials().at(static_cast<std::size_t>(n)); }

int twice_of(double x) {
  const double t = 2.0 * x;
  const double r = std::round(t);
  if (!std::isfinite(x) || std::abs(t - r) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "clebsch_gordan: argument " + std::to_string(x) + " is not a half-integer");
  }
  return static_cast<int>(r);
}

}  // namespace

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
  const int tj1 = twice_of(j1), tm1 = twice_of(m1);
  const int tj2 = twice_of(j2), tm2 = twice_of(m2);
  const int tJ = twice_of(J), tM = twice_of(M);

  if (tj1 < 0 || tj2 < 0 || tJ < 0) return 0.0;
  if (tm1 + tm2 != tM) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0.0;
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tJ + tM) % 2 != 0) return 0.0;
  if (tJ > tj1 + tj2 || tJ < std::abs(tj1 - tj2) || (tj1 + tj2 + tJ) % 2 != 0) return 0.0;

  // Integer combinations used by the Racah closed form.
  const int a = (tj1 + tj2 - tJ) / 2;
  const int b = (tj1 - tj2 + tJ) / 2;
  const int c = (-tj1 + tj2 + tJ) / 2;
  const int total = (tj1 + tj2 + tJ) / 2 + 1;
  const int p1 = (tj1 + tm1) / 2, q1 = (tj1 - tm1) / 2;
  const int p2 = (tj2 + tm2) / 2, q2 = (tj2 - tm2) / 2;
  const int pJ = (tJ + tM) / 2, qJ = (tJ - tM) / 2;

  const double log_prefactor =
      0.5 * (std::log(tJ + 1.0) + log_fact(a) + log_fact(b) + log_fact(c) - log_fact(total) +
             log_fact(p1) + log_fact(q1) + log_fact(p2) + log_fact(q2) + log_fact(pJ) +
             log_fact(qJ));

  // k ranges over values keeping every factorial argument non-negative.
  const int k_min = std::max({0, (tj2 - tJ - tm1) / 2, (tj1 - tJ + tm2) / 2});
  const int k_max = std::min({a, q1, p2});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double log_term = log_fact(k) + log_fact(a - k) + log_fact(q1 - k) +
                            log_fact(p2 - k) + log_fact((tJ - tj2 + tm1) / 2 + k) +
                            log_fact((tJ - tj1 - tm2) / 2 + k);
    const double term = std::exp(log_prefactor - log_term);
    sum += (k % 2 == 0) ? term : -term;
  }
  return sum;
}

std::complex<double> spherical_harmonic(int k, int q, double theta, double phi) {
  const int aq = std::abs(q);
  if (k < 0 || aq > k) return 0.0;
  const double x = std::cos(theta);
  const double s = std::sin(theta);

  // Normalized associated Legendre P~_l^m with
  // Y_lm = P~_l^m(x) e^{i m phi}; stable upward recursion in l.
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 1; m <= aq; ++m) {
    pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
  }
  double value = pmm;
  if (k > aq) {
    double p_prev = pmm;
    double p_curr = std::sqrt(2.0 * aq + 3.0) * x * pmm;
    for (int l = aq + 2; l <= k; ++l) {
      const double a_l = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l * l - aq * aq)));
      const double b_l = std::sqrt(((l - 1.0) * (l - 1.0) - aq * aq) /
                                   (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const double p_next = a_l * (x * p_curr - b_l * p_prev);
      p_prev = p_curr;
      p_curr = p_next;
    }
    value = p_curr;
  }
  std::complex<double> y = value * std::polar(1.0, aq * phi);
  if (q < 0) {
    y = std::conj(y);
    if (aq % 2 != 0) y = -y;
  }
  return y;
}

SphereGrid SphereGrid::gauss_legendre(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sphere grid needs positive resolution");
  }
  SphereGrid grid;
  grid.theta.resize(n_theta);
  grid.theta_weight.resize(n_theta);
  // Newton iteration on P_n with the usual Chebyshev starting guesses.
  for (int i = 0; i < n_theta; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n_theta + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n_theta; ++l) {
        const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      if (n_theta == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n_theta * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int l = 2; l <= n_theta; ++l) {
      const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    dp = n_theta * (x * p1 - p0) / (x * x - 1.0);
    grid.theta(i) = std::acos(x);
    grid.theta_weight(i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  grid.phi.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) grid.phi(j) = 2.0 * std::numbers::pi * j / n_phi;
  grid.phi_weight = 2.0 * std::numbers::pi / n_phi;
  return grid;
}

SphereGrid SphereGrid::uniform(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sphere grid needs positive resolution");
  }
  SphereGrid grid;
  grid.theta.resize(n_theta);
  grid.theta_weight.resize(n_theta);
  const double h = std::numbers::pi / n_theta;
  for (int i = 0; i < n_theta; ++i) {
    grid.theta(i) = (i + 0.5) * h;
    grid.theta_weight(i) = std::sin(grid.theta(i)) * h;
  }
  grid.phi.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) grid.phi(j) = 2.0 * std::numbers::pi * j / n_phi;
  grid.phi_weight = 2.0 * std::numbers::pi / n_phi;
  return grid;
}

double WignerMap::sphere_integral() const {
  return grid.phi_weight * grid.theta_weight.dot(values.rowwise().sum());
}

std::vector<std::complex<double>> state_multipoles(SpinQuantum spin, const QuditState& state) {
  const int d = spin.dim();
  require_same_dim(state.size(), d, "state_multipoles");
  const double f = spin.value();
  const int kmax = spin.twice();
  std::vector<std::complex<double>> rho((kmax + 1) * (kmax + 1));
  // T_kq = sum_{m,m'} (-1)^{f-m'} <f m; f -m' | k q> |m><m'|
  // rho_kq = Tr(rho T_kq^dagger) = sum (-1)^{f-m'} <f m; f -m'|k q> <m'|rho|m>
  for (int k = 0; k <= kmax; ++k) {
    for (int q = -k; q <= k; ++q) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < d; ++i) {
        const double m = spin.m(i);
        const double mp = m - q;
        const double index_p = mp + f;
        if (index_p < -0.5 || index_p > d - 0.5) continue;
        const int ip = static_cast<int>(std::lround(index_p));
        const double cg = clebsch_gordan(f, m, f, -mp, k, q);
        if (cg == 0.0) continue;
        const int phase_exp = static_cast<int>(std::lround(f - mp));
        const double sign = (phase_exp % 2 == 0) ? 1.0 : -1.0;
        // <m'|rho|m> = psi_{m'} conj(psi_m)
        acc += sign * cg * state(ip) * std::conj(state(i));
      }
      rho[k * k + (q + k)] = acc;
    }
  }
  return rho;
}

double wigner_value(SpinQuantum spin, const std::vector<std::complex<double>>& multipoles,
                    double theta, double phi) {
  const int kmax = spin.twice();
  std::complex<double> acc = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    for (int q = -k; q <= k; ++q) {
      acc += multipoles[k * k + (q + k)] * spherical_harmonic(k, q, theta, phi);
    }
  }
  return std::sqrt(spin.dim() / (4.0 * std::numbers::pi)) * acc.real();
}

WignerMap wigner_map(const SpinOps& ops, const QuditState& state, const SphereGrid& grid) {
  const auto rho = state_multipoles(ops.spin, state);
  WignerMap map;
  map.grid = grid;
  map.values.resize(grid.theta.size(), grid.phi.size());
  for (Eigen::Index i = 0; i < grid.theta.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.phi.size(); ++j) {
      map.values(i, j) = wigner_value(ops.spin, rho, grid.theta(i), grid.phi(j));
    }
  }
  return map;
}

}  // namespace qsq
