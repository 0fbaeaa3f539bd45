#include "qsq/hyperfine.hpp"

#include <cmath>
#include <numbers>

#include "qsq/error.hpp"
#include "qsq/wigner.hpp"

namespace qsq {

std::string to_string(QuadrupoleForm form) {
  switch (form) {
    case QuadrupoleForm::kAsWritten: return "as-written";
    case QuadrupoleForm::kCasimir: return "casimir";
  }
  return "?";
}

QuadrupoleForm parse_quadrupole_form(const std::string& text) {
  if (text == "as-written") return QuadrupoleForm::kAsWritten;
  if (text == "casimir") return QuadrupoleForm::kCasimir;
  throw Error(ErrorCode::kInvalidArgument, "unknown quadrupole form '" + text + "'");
}

void validate(const AtomParams& p) {
  const bool finite = std::isfinite(p.a_hz) && std::isfinite(p.b_hz) && std::isfinite(p.g_j) &&
                      std::isfinite(p.g_i) && std::isfinite(p.mu_b) && std::isfinite(p.mu_n);
  if (!finite) throw Error(ErrorCode::kConfig, "atom constants must be finite");
  if (p.b_hz != 0.0 && (p.i.twice() < 2 || p.j.twice() < 2)) {
    throw Error(ErrorCode::kConfig, "quadrupole term needs i, j >= 1");
  }
}

namespace {

struct Angular {
  Eigen::MatrixXd z, plus;  // real in the |m> basis
};

Angular angular(SpinQuantum s) {
  const int d = s.dim();
  Angular a{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  const double f = s.value();
  for (int k = 0; k < d; ++k) {
    const double m = s.m(k);
    a.z(k, k) = m;
    if (k + 1 < d) a.plus(k + 1, k) = std::sqrt(f * (f + 1) - m * (m + 1));
  }
  return a;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd build_hamiltonian(const AtomParams& p, double b_field) {
  validate(p);
  const Angular ai = angular(p.i);
  const Angular aj = angular(p.j);
  const Eigen::MatrixXd id_i = Eigen::MatrixXd::Identity(p.i.dim(), p.i.dim());
  const Eigen::MatrixXd id_j = Eigen::MatrixXd::Identity(p.j.dim(), p.j.dim());
  // i.j = iz jz + (i+ j- + i- j+)/2
  const Eigen::MatrixXd k = kron(ai.z, aj.z) + 0.5 * (kron(ai.plus, aj.plus.transpose()) +
                                                     kron(ai.plus.transpose(), aj.plus));
  const Eigen::Index n = k.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const double i = p.i.value(), j = p.j.value();
  const double ci = i * (i + 1), cj = j * (j + 1);

  Eigen::MatrixXd h = p.a_hz * k;
  if (p.b_hz != 0.0) {
    Eigen::MatrixXd q;
    if (p.quadrupole == QuadrupoleForm::kAsWritten) {
      q = 1.5 * k * (2.0 * k + (1.0 - ci - cj) * id);
    } else {
      q = 3.0 * k * k + 1.5 * k - ci * cj * id;
    }
    h += p.b_hz * q / (2 * i * (2 * i - 1) * j * (2 * j - 1));
  }
  h += (p.g_j * p.mu_b * b_field / kPlanck) * kron(id_i, aj.z);
  h += (p.g_i * p.mu_n * b_field / kPlanck) * kron(ai.z, id_j);
  return 0.5 * (h + h.transpose());
}

Eigen::VectorXd coupled_state(const AtomParams& p, SpinQuantum f, double m) {
  const int dj = p.j.dim();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p.i.dim() * dj);
  for (int a = 0; a < p.i.dim(); ++a) {
    for (int b = 0; b < dj; ++b) {
      const double mi = p.i.m(a), mj = p.j.m(b);
      if (mi + mj != m) continue;
      v(a * dj + b) = clebsch_gordan(p.i.value(), mi, p.j.value(), mj, f.value(), m);
    }
  }
  return v;
}

ManifoldSpectrum label_manifold(const AtomParams& p, double b_field, SpinQuantum f) {
  const int lo = std::abs(p.i.twice() - p.j.twice());
  const int hi = p.i.twice() + p.j.twice();
  if (f.twice() < lo || f.twice() > hi || (f.twice() - lo) % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "f = " + f.to_string() + " is not in " +
                                                 SpinQuantum::from_twice(lo).to_string() + ".." +
                                                 SpinQuantum::from_twice(hi).to_string());
  }
  const Eigen::MatrixXd h = build_hamiltonian(p, b_field);
  const int dj = p.j.dim();
  ManifoldSpectrum out;
  out.f = f;
  out.b_field = b_field;
  for (int k = 0; k < f.dim(); ++k) {
    const double m = f.m(k);
    std::vector<int> idx;
    for (int a = 0; a < p.i.dim(); ++a) {
      for (int b = 0; b < dj; ++b) {
        if (p.i.m(a) + p.j.m(b) == m) idx.push_back(a * dj + b);
      }
    }
    const int n = static_cast<int>(idx.size());
    Eigen::MatrixXd block(n, n);
    Eigen::VectorXd target(n);
    const Eigen::VectorXd full_target = coupled_state(p, f, m);
    for (int r = 0; r < n; ++r) {
      target(r) = full_target(idx[r]);
      for (int c = 0; c < n; ++c) block(r, c) = h(idx[r], idx[c]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block);
    if (eig.info() != Eigen::Success) {
      throw Error(ErrorCode::kNonFinite, "hyperfine block diagonalization failed");
    }
    const Eigen::VectorXd overlaps = (eig.eigenvectors().transpose() * target).array().square();
    Eigen::Index best = 0;
    overlaps.maxCoeff(&best);
    if (overlaps(best) < 0.6) {
      throw Error(ErrorCode::kManifoldMixing,
                  "level m = " + std::to_string(m) + " of f = " + f.to_string() +
                      " has max zero-field overlap " + std::to_string(overlaps(best)) +
                      " at B = " + std::to_string(b_field) + " T");
    }
    out.levels.push_back({m, eig.eigenvalues()(best), overlaps(best)});
  }
  return out;
}

QuadraticFit fit_quadratic(const std::vector<double>& m, const std::vector<double>& energy_hz) {
  if (m.size() != energy_hz.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "fit_quadratic: m and E differ in length");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    x(r, 0) = 1.0;
    x(r, 1) = m[r];
    x(r, 2) = m[r] * m[r];
    y(r) = energy_hz[r];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (n < 3 || qr.rank() < 3) {
    throw Error(ErrorCode::kRankDeficient, "quadratic fit needs at least three distinct m");
  }
  const Eigen::Vector3d c = qr.solve(y);
  QuadraticFit fit;
  fit.offset_hz = c(0);
  fit.omega_l = 2.0 * std::numbers::pi * c(1);
  fit.chi = 2.0 * std::numbers::pi * c(2);
  fit.residual_rms_hz = std::sqrt((x * c - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

QuadraticFit fit_quadratic(const ManifoldSpectrum& spectrum) {
  std::vector<double> m, e;
  for (const auto& level : spectrum.levels) {
    m.push_back(level.m);
    e.push_back(level.energy_hz);
  }
  return fit_quadratic(m, e);
}

std::vector<HyperfineRow> hyperfine_sweep(const AtomParams& p, SpinQuantum f,
                                          const std::vector<double>& b_fields) {
  std::vector<HyperfineRow> rows;
  for (double b : b_fields) {
    const ManifoldSpectrum spec = label_manifold(p, b, f);
    HyperfineRow row;
    row.b_field = b;
    row.fit = fit_quadratic(spec);
    row.min_overlap = 1.0;
    for (const auto& level : spec.levels) row.min_overlap = std::min(row.min_overlap, level.overlap);
    rows.push_back(row);
  }
  return rows;
}

double power_law_exponent(const std::vector<HyperfineRow>& rows) {
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    if (r.b_field > 0.0 && r.fit.chi != 0.0) {
      lx.push_back(std::log(r.b_field));
      ly.push_back(std::log(std::abs(r.fit.chi)));
    }
  }
  if (lx.size() < 2) throw Error(ErrorCode::kRankDeficient, "power-law fit needs two fields");
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qsq
