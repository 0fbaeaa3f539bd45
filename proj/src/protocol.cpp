#include "qsq/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <utility>

namespace qsq {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

class UnitaryCache {
 public:
  explicit UnitaryCache(const SpinOps& ops) : ops_(ops) {}

  const ComplexMatrix& get(const RotationPulse& pulse) {
    for (const auto& [key, u] : entries_) {
      if (key.axis == pulse.axis && key.angle == pulse.angle) return u;
    }
    entries_.emplace_back(pulse, rotation_unitary(ops_, pulse));
    return entries_.back().second;
  }

 private:
  const SpinOps& ops_;
  std::vector<std::pair<RotationPulse, ComplexMatrix>> entries_;
};

double xi2_or_inf(const SpinOps& ops, const QuditState& state) {
  const SpinMoments mom = spin_moments(ops, state);
  if (!(mom.mean.norm() > 1e-6 * ops.spin.value())) return std::numeric_limits<double>::infinity();
  return wineland_xi2(mom, ops.spin);
}

template <typename Evolve>
BenchmarkResult scan_benchmark(const SpinOps& ops, double chi, int resolution, Evolve&& evolve) {
  if (resolution < 2) throw Error(ErrorCode::kInvalidArgument, "benchmark resolution must be >= 2");
  if (!(chi > 0.0)) throw Error(ErrorCode::kInvalidArgument, "chi must be positive");
  const double span = 0.5;
  int best = 1;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= resolution; ++i) {
    const double val = xi2_or_inf(ops, evolve(span * i / resolution));
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  const double lo = span * std::max(best - 1, 0) / resolution;
  const double hi = span * std::min(best + 1, resolution) / resolution;
  const double chi_t = golden_section_minimize(
      [&](double x) { return xi2_or_inf(ops, evolve(x)); }, lo, hi, 1e-10);
  BenchmarkResult out;
  const double refined = xi2_or_inf(ops, evolve(chi_t));
  if (refined <= best_val) {
    out.chi_t = chi_t;
    out.xi2 = refined;
  } else {
    out.chi_t = span * best / resolution;
    out.xi2 = best_val;
  }
  out.t = out.chi_t / chi;
  out.xi2_db = to_db(out.xi2);
  out.state = evolve(out.chi_t);
  return out;
}

}  // namespace

Trajectory run_schedule(const SpinOps& ops, const QuditState& initial, const Schedule& schedule) {
  require_same_dim(initial.size(), ops.spin.dim(), "run_schedule");
  const QzePropagator qze = make_qze(ops, schedule.chi, schedule.dt);
  UnitaryCache cache(ops);
  Trajectory traj;
  traj.states.reserve(schedule.steps.size());
  traj.reports.reserve(schedule.steps.size());
  traj.times.reserve(schedule.steps.size());
  QuditState state = initial;
  double chi_t = 0.0;
  for (const auto& step : schedule.steps) {
    if (step) state = cache.get(*step) * state;
    apply_qze_inplace(state, qze);
    chi_t += schedule.chi * schedule.dt;
    traj.states.push_back(state);
    traj.reports.push_back(squeezing_report(ops, state));
    traj.times.push_back(chi_t);
  }
  return traj;
}

BenchmarkResult oat_benchmark(const SpinOps& ops, double chi, int resolution) {
  const QuditState initial = css_x(ops);
  const Eigen::ArrayXd m2 = ops.fz_diag.array().square();
  return scan_benchmark(ops, chi, resolution, [&](double chi_t) {
    QuditState s = initial;
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) *= std::polar(1.0, -chi_t * m2(i));
    return s;
  });
}

ComplexMatrix tact_generator(const SpinOps& ops, TactNormalization norm) {
  const ComplexMatrix anti = ops.fy * ops.fz + ops.fz * ops.fy;
  return norm == TactNormalization::kHalfAnticommutator ? ComplexMatrix(0.5 * anti) : anti;
}

BenchmarkResult tact_benchmark(const SpinOps& ops, double chi, int resolution,
                               TactNormalization norm) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(tact_generator(ops, norm));
  const ComplexMatrix& vecs = solver.eigenvectors();
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const ComplexVector coeffs = vecs.adjoint() * css_x(ops);
  return scan_benchmark(ops, chi, resolution, [&](double chi_t) {
    ComplexVector c = coeffs;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -chi_t * vals(i));
    return QuditState(vecs * c);
  });
}

QuditState toggling_cycle(const SpinOps& ops, const QuditState& state, double chi, double dt) {
  const QzePropagator qze = make_qze(ops, chi, dt);
  QuditState s = rotation_unitary(ops, {Axis::kY, kHalfPi}) * state;
  apply_qze_inplace(s, qze);
  s = rotation_unitary(ops, {Axis::kY, -kHalfPi}) * s;
  apply_qze_inplace(s, qze);
  return s;
}

Alignment align_to_y(const SpinOps& ops, const QuditState& state) {
  // Throws kMeanSpinUndefined when the Wineland parameter is undefined.
  wineland_xi2(ops, state);
  const ComplexVector coeffs = ops.fx_basis.adjoint() * state;
  auto rotated = [&](double angle) {
    ComplexVector c = coeffs;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -angle * ops.fz_diag(i));
    return QuditState(ops.fx_basis * c);
  };
  auto objective = [&](double angle) {
    const SpinMoments mom = spin_moments(ops, rotated(angle));
    if (!(std::abs(mom.mean(0)) > 1e-6 * ops.spin.value())) {
      return std::numeric_limits<double>::infinity();
    }
    return fixed_axis_xi2(mom, ops.spin);
  };

  // Scan in order of increasing |angle| so ties resolve toward zero.
  constexpr int kHalfGrid = 360;
  const double step = std::numbers::pi / kHalfGrid;
  double best_angle = 0.0;
  double best_val = objective(0.0);
  double worst_val = best_val;
  for (int i = 1; i <= kHalfGrid; ++i) {
    for (int sign : {1, -1}) {
      const double a = sign * i * step;
      const double v = objective(a);
      worst_val = std::max(worst_val, v);
      if (v < best_val - 1e-14) {
        best_val = v;
        best_angle = a;
      }
    }
  }
  Alignment out;
  if (worst_val - best_val < 1e-12) {
    out.angle = 0.0;
  } else {
    const double lo = std::max(-std::numbers::pi, best_angle - step);
    const double hi = std::min(std::numbers::pi, best_angle + step);
    out.angle = golden_section_minimize(objective, lo, hi, 1e-8);
    if (objective(out.angle) > best_val) out.angle = best_angle;
  }
  out.state = rotated(out.angle);
  out.xi2_y = objective(out.angle);
  return out;
}

std::vector<double> fidelity_curve(const SpinOps& ops, const QuditState& reference,
                                   FidelityGenerator generator,
                                   const std::vector<double>& chi_times) {
  Eigen::VectorXd weights;
  Eigen::VectorXd eigenvalues;
  if (generator == FidelityGenerator::kFz2) {
    weights = reference.cwiseAbs2();
    eigenvalues = ops.fz_diag.array().square();
  } else {
    // fy^2 shares the fy eigenbasis with eigenvalues m^2.
    weights = (ops.fy_basis.adjoint() * reference).cwiseAbs2();
    eigenvalues = ops.fz_diag.array().square();
  }
  std::vector<double> out;
  out.reserve(chi_times.size());
  for (double chi_t : chi_times) {
    Complex amp = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      amp += weights(i) * std::polar(1.0, -chi_t * eigenvalues(i));
    }
    out.push_back(std::min(1.0, std::norm(amp)));
  }
  return out;
}

double prep_min_xi2(const SpinOps& ops, const std::vector<int>& positions, int horizon,
                    double chi_dt) {
  static thread_local std::map<int, ComplexMatrix> cache;
  // R_y(+-pi/2) cached per dimension, keyed by +-2f.
  auto lookup = [&](int key) -> const ComplexMatrix& {
    auto it = cache.find(key);
    if (it == cache.end()) {
      const double sign = key > 0 ? 1.0 : -1.0;
      it = cache.emplace(key, rotation_unitary(ops, {Axis::kY, sign * kHalfPi})).first;
    }
    return it->second;
  };
  const ComplexMatrix* plus = &lookup(ops.spin.twice());
  const ComplexMatrix* minus = &lookup(-ops.spin.twice());

  const QzePropagator qze = make_qze(ops, 1.0, chi_dt);
  QuditState s = css_x(ops);
  double best = std::numeric_limits<double>::infinity();
  int sign = 1;
  std::size_t next = 0;
  for (int k = 0; k < horizon; ++k) {
    if (next < positions.size() && positions[next] == k) {
      s = (sign > 0 ? *plus : *minus) * s;
      sign = -sign;
      ++next;
    }
    apply_qze_inplace(s, qze);
    best = std::min(best, xi2_or_inf(ops, s));
  }
  return best;
}

ScriptedProtocol scripted_protocol(const SpinOps& ops, const ScriptedSearch& search) {
  if (search.horizon < 7 || search.horizon > search.n_steps || search.coarse_stride < 1) {
    throw Error(ErrorCode::kInvalidArgument, "scripted protocol: invalid search window");
  }
  const double chi_dt = search.chi_total / search.n_steps;
  constexpr int kPulses = 6;

  // Coarse combinations of six positions on a stride grid.
  std::vector<int> grid;
  for (int p = 0; p < search.horizon - 1; p += search.coarse_stride) grid.push_back(p);
  std::vector<std::pair<double, std::vector<int>>> coarse;
  if (static_cast<int>(grid.size()) >= kPulses) {
    std::vector<int> idx(kPulses);
    std::iota(idx.begin(), idx.end(), 0);
    const int n = static_cast<int>(grid.size());
    while (true) {
      std::vector<int> pos(kPulses);
      for (int i = 0; i < kPulses; ++i) pos[i] = grid[idx[i]];
      coarse.emplace_back(prep_min_xi2(ops, pos, search.horizon, chi_dt), pos);
      int i = kPulses - 1;
      while (i >= 0 && idx[i] == n - kPulses + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < kPulses; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  std::stable_sort(coarse.begin(), coarse.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  auto valid = [&](const std::vector<int>& p) {
    for (int i = 0; i < kPulses; ++i) {
      if (p[i] < 0 || p[i] >= search.horizon) return false;
      if (i > 0 && p[i] <= p[i - 1]) return false;
    }
    return true;
  };

  // Coordinate-descent refinement of the best coarse candidates.
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<int> best_pos;
  const std::size_t n_refine = std::min<std::size_t>(20, coarse.size());
  for (std::size_t c = 0; c < n_refine; ++c) {
    std::vector<int> pos = coarse[c].second;
    double cur = coarse[c].first;
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < kPulses; ++i) {
        for (int delta : {-2, -1, 1, 2}) {
          std::vector<int> trial = pos;
          trial[i] += delta;
          if (!valid(trial)) continue;
          const double v = prep_min_xi2(ops, trial, search.horizon, chi_dt);
          if (v < cur - 1e-12) {
            cur = v;
            pos = trial;
            improved = true;
          }
        }
      }
    }
    if (cur < best_val) {
      best_val = cur;
      best_pos = pos;
    }
  }

  ScriptedProtocol out;
  out.prep_steps = best_pos;
  out.best_prep_xi2 = best_val;

  // Build the full episode: prep pulses until the threshold is reached,
  // then the stabilization block.
  const double threshold = search.threshold_xi2 > 0.0 ? search.threshold_xi2 : best_val;
  const QzePropagator qze = make_qze(ops, 1.0, chi_dt);
  out.schedule.chi = 1.0;
  out.schedule.dt = chi_dt;
  QuditState s = css_x(ops);
  int sign = 1;
  std::size_t next = 0;
  int hit = -1;
  for (int k = 0; k < search.n_steps; ++k) {
    std::optional<RotationPulse> pulse;
    if (hit < 0) {
      if (next < best_pos.size() && best_pos[next] == k) {
        pulse = RotationPulse{Axis::kY, sign * kHalfPi};
        sign = -sign;
        ++next;
      }
    } else {
      const int j = k - hit - 1;
      if (j == 0) {
        pulse = RotationPulse{Axis::kX, std::numbers::pi / 3.0};
      } else if (j == 1) {
        pulse = RotationPulse{Axis::kY, -std::numbers::pi / 4.0};
      } else {
        pulse = RotationPulse{Axis::kY, (j % 2 == 0) ? kHalfPi : -kHalfPi};
      }
    }
    if (pulse) s = rotation_unitary(ops, *pulse) * s;
    apply_qze_inplace(s, qze);
    out.schedule.steps.push_back(pulse);
    if (hit < 0 && (xi2_or_inf(ops, s) <= threshold * (1.0 + 1e-12) || k + 1 == search.horizon)) {
      hit = k;
    }
  }
  out.hit_step = hit;
  // The probe is the state right after the first R_y(+pi/2) of the
  // alternating cycle, so encoding continues with R_y(-pi/2).
  out.probe_step = hit + 4;
  out.trajectory = run_schedule(ops, css_x(ops), out.schedule);
  return out;
}

}  // namespace qsq
