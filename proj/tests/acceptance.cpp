// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qsq/config.hpp"
#include "qsq/de.hpp"
#include "qsq/hyperfine.hpp"
#include "qsq/metrics.hpp"
#include "qsq/metrology.hpp"
#include "qsq/ppo.hpp"
#include "qsq/protocol.hpp"
#include "qsq/wigner.hpp"

using namespace qsq;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Lines are printed in criterion order once everything has run; progress goes to stderr.
struct Report {
  int failures = 0;
  std::map<int, std::string> lines;
  void line(int id, bool pass, const std::string& detail) {
    lines[id] = "criterion " + std::to_string(id) + ": " + (pass ? "PASS" : "FAIL") + "  " + detail;
    std::cerr << "  [criterion " << id << " done]" << std::endl;
    if (!pass) ++failures;
  }
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

const SpinOps& ops21() {
  static const SpinOps ops = build_spin_ops(SpinQuantum::from_twice(21));
  return ops;
}

// ---------------------------------------------------------------- 1, 2

void criterion_1(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const BenchmarkResult oat = oat_benchmark(ops21(), 1.0);
  const double t = seconds_since(t0);
  r.line(1, within(oat.xi2_db, -7.17, 0.05) && t < 60.0,
         "OAT min xi2 " + fmt(oat.xi2_db, 6) + " dB (target -7.17 +- 0.05) at chi t " +
             fmt(oat.chi_t) + ", " + fmt(t, 3) + " s");
}

void criterion_2(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const BenchmarkResult half = tact_benchmark(ops21(), 1.0, 2000, TactNormalization::kHalfAnticommutator);
  const BenchmarkResult full = tact_benchmark(ops21(), 1.0, 2000, TactNormalization::kAnticommutator);
  const double t = seconds_since(t0);
  const double spread = std::abs(half.xi2_db - full.xi2_db);
  r.line(2, within(half.xi2_db, -8.07, 0.1) && spread <= 1e-6 && t < 300.0,
         "TACT min xi2 " + fmt(half.xi2_db, 6) + " dB (target -8.07 +- 0.1), normalization spread " +
             fmt(spread, 3) + " dB, " + fmt(t, 3) + " s");
}

// ---------------------------------------------------------------- 3

void criterion_3(Report& r) {
  const SpinOps& ops = ops21();
  const ComplexMatrix rm = rotation_unitary(ops, {Axis::kY, -std::numbers::pi / 2});
  const ComplexMatrix rp = rotation_unitary(ops, {Axis::kY, std::numbers::pi / 2});
  const double conj_err = (rm * ops.fz * ops.fz * rp - ops.fx * ops.fx).cwiseAbs().maxCoeff();

  const double chi_dt = 4.49e-3;
  const ComplexMatrix target = hermitian_exp(-(ops.fy * ops.fy), 2.0 * chi_dt);
  std::mt19937_64 rng(20);
  std::normal_distribution<double> g;
  // Reported alongside: the same comparison with the generator acting for a single step.
  const ComplexMatrix single = hermitian_exp(-(ops.fy * ops.fy), chi_dt);
  double worst = 0.0, worst_single = 0.0;
  for (int k = 0; k < 20; ++k) {
    QuditState psi(ops.spin.dim());
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = {g(rng), g(rng)};
    psi.normalize();
    const QuditState out = toggling_cycle(ops, psi, 1.0, chi_dt);
    worst = std::max(worst, 1.0 - fidelity(out, target * psi));
    worst_single = std::max(worst_single, 1.0 - fidelity(out, single * psi));
  }
  const double bound = 10.0 * chi_dt * chi_dt;
  r.line(3, conj_err <= 1e-10 && worst <= bound,
         "conjugation error " + fmt(conj_err, 3) + " (<= 1e-10), worst deficit vs exp(+i chi 2dt fy^2) " +
             fmt(worst, 3) + " (<= " + fmt(bound, 3) + "); vs exp(+i chi dt fy^2) " +
             fmt(worst_single, 3));
}

// ---------------------------------------------------------------- 4

ScriptedProtocol scripted() {
  const EnvConfig env;
  ScriptedSearch s;
  s.n_steps = env.n_steps;
  s.chi_total = env.chi_total;
  s.threshold_xi2 = resolve_xi2_ref(env);
  return scripted_protocol(ops21(), s);
}

void criterion_4(Report& r, const ScriptedProtocol& sp) {
  double best = std::numeric_limits<double>::infinity();
  double at = NAN;
  for (std::size_t k = 0; k < sp.trajectory.reports.size(); ++k) {
    if (sp.trajectory.times[k] > 0.16 + 1e-12) break;
    const double x = sp.trajectory.reports[k].xi2_db;
    if (std::isfinite(x) && x < best) {
      best = x;
      at = sp.trajectory.times[k];
    }
  }
  r.line(4, best <= -8.0,
         "scripted min xi2 " + fmt(best, 6) + " dB at chi t " + fmt(at) + " (<= -8.0 dB within chi t <= 0.16)");
}

// ---------------------------------------------------------------- 5

struct TrainedPolicy {
  bool met = false;
  std::uint64_t seed = 0;
  EpisodeRecord episode;
};

TrainedPolicy criterion_5(Report& r) {
  const EnvConfig env;
  const PpoConfig ppo;
  TrainedPolicy best;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainOptions opt;
    opt.stop_when = StabilizationTarget{};
    const TrainResult res = train(env, ppo, seed, opt);
    const EpisodeRecord& ep = res.greedy;
    detail += "seed " + std::to_string(seed) + ": min xi2 " + fmt(ep.min_xi2_db()) +
              " dB, post-hit xi_y2 " + fmt(ep.post_hit_xi2_y_db()) + " dB, R_y(pi/2) share " +
              fmt(ep.post_hit_ry_fraction(), 3) + ", " +
              std::to_string(res.log.empty() ? 0 : res.log.back().env_steps) + " steps, " +
              fmt(seconds_since(t0) / 60.0, 3) + " min" + (res.aborted ? " (aborted)" : "") + "; ";
    std::cerr << "  " << detail.substr(detail.rfind("seed")) << std::endl;
    if (!best.met) best = {res.target_met, seed, ep};
    if (res.target_met) break;
  }
  r.line(5, best.met,
         detail + "target min xi2 <= -7.5 dB, post-hit xi_y2 <= -4.0 dB, share >= 0.6");
  return best;
}

// ---------------------------------------------------------------- 6, 7

RlProbe probe_for(const TrainedPolicy& policy, const ScriptedProtocol& sp, std::string& source) {
  if (policy.met && policy.episode.k_star) {
    source = "trained policy (seed " + std::to_string(policy.seed) + ")";
    return rl_probe(policy.episode.states, policy.episode.actions, *policy.episode.k_star);
  }
  source = "scripted protocol";
  return {sp.trajectory.states[sp.probe_step - 1], sp.probe_step};
}

void criterion_6(Report& r, const RlProbe& probe, const std::string& source) {
  const SpinOps& ops = ops21();
  const EnvConfig env;
  const RunConfig defaults;
  PhaseSweepOptions po;
  po.chi_dt = env.chi_dt();
  po.de = defaults.de.de;
  for (int n = 1; n * po.chi_dt <= 0.3 + 1e-12; ++n) po.n_e.push_back(n);
  PhaseSweepOptions rx = po;
  rx.n_e.resize(std::min<std::size_t>(rx.n_e.size(), defaults.metrology.rx_dd_max_n_e));

  const QuditState aligned = aligned_tact_state(ops);
  const auto free_rows = phase_sweep(ops, aligned, EncodingProtocol::kFreeQze, po);
  const auto rx_rows = phase_sweep(ops, aligned, EncodingProtocol::kRxDd, rx);
  const auto rl_rows = phase_sweep(ops, probe.state, EncodingProtocol::kRlStabilized, po);

  const auto free_cross = sql_crossing_down(free_rows);
  const auto rx_cross = sql_crossing_down(rx_rows);
  double rl_worst = std::numeric_limits<double>::infinity();
  for (const auto& row : rl_rows) {
    if (row.chi_t >= 0.03 - 1e-12) rl_worst = std::min(rl_worst, row.gain_db);
  }
  const bool free_ok = free_cross && *free_cross >= 0.01 && *free_cross <= 0.03;
  const bool rx_ok = rx_cross && *rx_cross >= 0.025 && *rx_cross <= 0.075;
  const bool rl_ok = rl_worst > 0.0;
  r.line(6, free_ok && rx_ok && rl_ok,
         "free-qze SQL crossing chi t " + (free_cross ? fmt(*free_cross) : "none") +
             " (0.01..0.03), rx-dd " + (rx_cross ? fmt(*rx_cross) : "none") +
             " (0.025..0.075), rl-stabilized worst gain over [0.03, 0.3] " + fmt(rl_worst) +
             " dB (> 0); probe from " + source);
}

void criterion_7(Report& r, const RlProbe& probe, const std::string& source) {
  const SpinOps& ops = ops21();
  const EnvConfig env;
  const RunConfig defaults;
  const FieldParams field = defaults.metrology.field;
  FieldSweepOptions fo;
  fo.dt = env.chi_dt() / field.chi;
  fo.t_p = probe.steps * fo.dt;
  fo.de = defaults.de.de;
  for (int k = 0; k <= 265; ++k) fo.t_tot.push_back(3.5e-3 + k * 1e-4);  // 3.5 .. 30 ms
  const auto rows = field_sweep(ops, probe.state, EncodingProtocol::kRlStabilized, field, fo);
  // Row closest to 30 ms.
  const FieldSweepRow* at30 = &rows.front();
  for (const auto& row : rows) {
    if (std::abs(row.t_tot - 30e-3) < std::abs(at30->t_tot - 30e-3)) at30 = &row;
  }
  const auto cross = sql_crossing_up(rows);
  const double pt = at30->delta_b * 1e12;
  const bool cross_ok = cross && *cross >= 4.0e-3 && *cross <= 7.0e-3;
  const bool db_ok = pt <= 16.0;
  const bool gain_ok = at30->sql_ratio_db >= 2.5;
  r.line(7, cross_ok && db_ok && gain_ok,
         "SQL crossing " + (cross ? fmt(*cross * 1e3) + " ms" : std::string("none")) +
             " (5.5 +- 1.5 ms), dB(" + fmt(at30->t_tot * 1e3) + " ms) " + fmt(pt) +
             " pT/sqrt(Hz) (<= 16), SQL " + fmt(at30->delta_b_sql * 1e12) + " pT/sqrt(Hz), gain " +
             fmt(at30->sql_ratio_db) + " dB (>= 2.5); T_p " + fmt(fo.t_p * 1e3) +
             " ms; probe from " + source);
}

// ---------------------------------------------------------------- 8

void criterion_8(Report& r) {
  // The fitter must be exact on a synthetic quadratic before constants are blamed.
  std::vector<double> m, e;
  for (int i = 0; i < 22; ++i) {
    m.push_back(-10.5 + i);
    e.push_back(661.9e3 * m.back() + 8.112 * m.back() * m.back());
  }
  const QuadraticFit synth = fit_quadratic(m, e);
  const bool solver_ok = std::abs(synth.chi / kTwoPi - 8.112) < 1e-8 &&
                         std::abs(synth.omega_l / kTwoPi - 661.9e3) < 1e-6;

  const AtomParams atom;
  const double b = 50e-6;
  const QuadraticFit fit = fit_quadratic(label_manifold(atom, b, SpinQuantum::from_twice(21)));
  const double omega = std::abs(fit.omega_l) / kTwoPi;
  const double chi = std::abs(fit.chi) / kTwoPi;
  const double gamma = omega / b;
  const bool omega_ok = std::abs(omega / 661.9e3 - 1.0) <= 0.01;
  const bool chi_ok = std::abs(chi / 8.112 - 1.0) <= 0.02;
  const bool gamma_ok = std::abs(gamma / 13.24e9 - 1.0) <= 0.01;
  AtomParams casimir = atom;
  casimir.quadrupole = QuadrupoleForm::kCasimir;
  const double chi_casimir =
      std::abs(fit_quadratic(label_manifold(casimir, b, SpinQuantum::from_twice(21))).chi) / kTwoPi;
  std::string flag;
  if (solver_ok && !(omega_ok && chi_ok && gamma_ok)) {
    flag = "; synthetic fit exact, mismatch attributed to the atomic constants";
  }
  r.line(8, solver_ok && omega_ok && chi_ok && gamma_ok,
         "Omega_L/2pi " + fmt(omega / 1e3, 7) + " kHz (661.9 +- 1%), chi/2pi " + fmt(chi, 6) +
             " Hz (8.112 +- 2%; Casimir form gives " + fmt(chi_casimir, 5) + " Hz), gamma/2pi " +
             fmt(gamma / 1e9, 6) + " GHz/T (13.24 +- 1%)" + flag);
}

// ---------------------------------------------------------------- 9

double gae_error() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int n : {1, 5, 70}) {
    std::vector<double> rw(n), v(n);
    for (int i = 0; i < n; ++i) {
      rw[i] = g(rng);
      v[i] = g(rng);
    }
    const auto fast = compute_gae(rw, v, 0.9999, 0.96);
    for (int t = 0; t < n; ++t) {
      double slow = 0.0, w = 1.0;
      for (int l = t; l < n; ++l) {
        slow += w * (rw[l] + 0.9999 * (l + 1 < n ? v[l + 1] : 0.0) - v[l]);
        w *= 0.9999 * 0.96;
      }
      worst = std::max(worst, std::abs(slow - fast[t]));
    }
  }
  return worst;
}

double gradient_error() {
  PpoConfig c;
  c.hidden = {8, 8};
  c.entropy_weight = 0.05;
  c.actor_output_gain = 1.0;
  std::mt19937_64 rng(3);
  ActorCritic nets = ActorCritic::init(c, rng);
  std::normal_distribution<double> g;
  const int n = 32;
  const double offsets[] = {0.0, 0.05, -0.05, 0.6, -0.6};
  Minibatch b;
  b.obs = Eigen::MatrixXd::NullaryExpr(Observation::kSize, n, [&] { return g(rng); });
  const Eigen::MatrixXd p = policy_forward(nets.actor, b.obs);
  b.actions.resize(n);
  b.old_log_prob.resize(n);
  b.advantages.resize(n);
  b.returns.resize(n);
  for (int j = 0; j < n; ++j) {
    b.actions[j] = j % kNumActions;
    b.old_log_prob(j) = std::log(p(b.actions[j], j)) + offsets[j % 5];
    b.advantages(j) = g(rng);
    b.returns(j) = g(rng);
  }
  const LossGradient lg = ppo_loss(nets, b, c);
  double worst = 0.0;
  const double h = 1e-6;
  for (auto [params, grad] : {std::pair{&nets.actor.params(), &lg.actor_grad},
                              std::pair{&nets.critic.params(), &lg.critic_grad}}) {
    Eigen::VectorXd fd(params->size());
    for (Eigen::Index i = 0; i < params->size(); ++i) {
      const double keep = (*params)(i);
      (*params)(i) = keep + h;
      const double up = ppo_loss(nets, b, c).report.total;
      (*params)(i) = keep - h;
      const double down = ppo_loss(nets, b, c).report.total;
      (*params)(i) = keep;
      fd(i) = (up - down) / (2 * h);
    }
    worst = std::max(worst, (fd - *grad).norm() / grad->norm());
  }
  return worst;
}

double norm_drift() {
  const SpinOps& ops = ops21();
  const QzePropagator qze = make_qze(ops, 1.0, 0.314 / 70);
  const ComplexMatrix ry = rotation_unitary(ops, {Axis::kY, std::numbers::pi / 2});
  const ComplexMatrix rx = rotation_unitary(ops, {Axis::kX, -std::numbers::pi / 3});
  QuditState psi = css_x(ops);
  for (int k = 0; k < 10000; ++k) {
    psi = (k % 2 ? ry : rx) * psi;
    apply_qze_inplace(psi, qze);
  }
  return std::abs(psi.norm() - 1.0);
}

double wigner_error() {
  const SpinOps& ops = ops21();
  const SphereGrid grid = SphereGrid::gauss_legendre(24, 48);
  double worst = 0.0;
  for (const QuditState& s : {css_x(ops), oat_benchmark(ops, 1.0).state}) {
    worst = std::max(worst, std::abs(wigner_map(ops, s, grid).sphere_integral() - 1.0));
  }
  return worst;
}

double de_gap() {
  const SpinOps& ops = ops21();
  const RxContext ctx = RxContext::make(ops, aligned_tact_state(ops), 4 * 0.314 / 70);
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= RxSchedule::kMaxIndex; ++a) {
    for (int b = 0; b <= RxSchedule::kMaxIndex; ++b) best = std::min(best, de_cost(ctx, RxSchedule{{a, b}}));
  }
  DeConfig cfg;
  cfg.generations = 60;
  return std::abs(de_optimize(cfg, ctx, 2).best_cost - best);
}

void criterion_9(Report& r) {
  const double gae = gae_error();
  const double grad = gradient_error();
  const double norm = norm_drift();
  const double wig = wigner_error();
  const double de = de_gap();
  r.line(9, gae <= 1e-12 && grad <= 1e-5 && norm <= 1e-10 && wig <= 1e-6 && de <= 1e-12,
         "GAE " + fmt(gae, 3) + " (1e-12), gradient rel " + fmt(grad, 3) + " (1e-5), norm " +
             fmt(norm, 3) + " (1e-10), Wigner " + fmt(wig, 3) + " (1e-6), DE vs exhaustive " +
             fmt(de, 3));
}

// ---------------------------------------------------------------- 10

std::string deterministic_outputs() {
  const SpinOps& ops = ops21();
  std::string out;
  out += std::to_string(oat_benchmark(ops, 1.0).xi2) + "|";
  const RxContext ctx = RxContext::make(ops, aligned_tact_state(ops), 0.314 / 70);
  DeConfig cfg;
  cfg.generations = 40;
  out += schedule_json(de_optimize(cfg, ctx, 8).best, 0.0) + "|";
  const ScriptedProtocol sp = scripted();
  out += std::to_string(sp.hit_step) + "," + std::to_string(sp.probe_step) + "|";
  const auto rows = hyperfine_sweep(AtomParams{}, SpinQuantum::from_twice(21), {20e-6, 50e-6});
  for (const auto& row : rows) out += std::to_string(row.fit.chi) + ",";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", sp.trajectory.reports.back().xi2);
  return out + buf;
}

void criterion_10(Report& r) {
  PpoConfig c;
  c.buffer_size = 1400;
  c.minibatch = 350;
  c.epochs = 2;
  c.max_env_steps = 2800;
  const EnvConfig env;
  const TrainResult a = train(env, c, 7);
  const TrainResult b = train(env, c, 7);
  const bool train_same = a.nets.actor.params() == b.nets.actor.params() &&
                          a.nets.critic.params() == b.nets.critic.params() &&
                          log_line(a.log.back()) == log_line(b.log.back());
  const bool cmd_same = deterministic_outputs() == deterministic_outputs();
  r.line(10, train_same && cmd_same,
         std::string("training bit-identical: ") + (train_same ? "yes" : "no") +
             ", deterministic commands identical: " + (cmd_same ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  // --no-train skips criterion 5 (hours of training); 6 and 7 then use the scripted probe.
  const bool no_train = argc > 1 && std::string(argv[1]) == "--no-train";
  Report r;
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1(r);
  criterion_2(r);
  criterion_3(r);
  const ScriptedProtocol sp = scripted();
  criterion_4(r, sp);
  criterion_8(r);
  criterion_9(r);
  criterion_10(r);
  TrainedPolicy policy;
  if (no_train) {
    r.lines[5] = "criterion 5: SKIP  training not run (--no-train)";
  } else {
    policy = criterion_5(r);
  }
  std::string source;
  const RlProbe probe = probe_for(policy, sp, source);
  criterion_6(r, probe, source);
  criterion_7(r, probe, source);
  for (const auto& [id, text] : r.lines) std::cout << text << "\n";
  std::cout << (r.failures == 0 ? "all criteria pass" : std::to_string(r.failures) + " criteria fail")
            << " (" << fmt(seconds_since(t0) / 60.0, 3) << " min)" << std::endl;
  return r.failures == 0 ? 0 : 1;
}
