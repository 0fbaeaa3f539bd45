// squeeze: command-line front end. Every command writes into --out and
// updates manifest.json there.

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsq/config.hpp"
#include "qsq/de.hpp"
#include "qsq/error.hpp"
#include "qsq/hyperfine.hpp"
#include "qsq/io.hpp"
#include "qsq/metrics.hpp"
#include "qsq/metrology.hpp"
#include "qsq/ppo.hpp"
#include "qsq/protocol.hpp"
#include "qsq/wigner.hpp"

namespace {

using json = nlohmann::json;
using namespace qsq;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
  std::string transfer_f;
};

struct Context {
  RunConfig config;
  std::string hash;
  std::string out;
};

Context make_context(const Options& opt) {
  Context ctx;
  ctx.config = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  if (opt.seed) ctx.config.seed = *opt.seed;
  ctx.hash = config_hash(ctx.config);
  ctx.out = opt.out.empty() ? ctx.config.output_dir : opt.out;
  return ctx;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string wigner_csv(const WignerMap& map) {
  CsvWriter csv({"theta_rad", "phi_rad", "w"});
  for (Eigen::Index a = 0; a < map.grid.theta.size(); ++a) {
    for (Eigen::Index b = 0; b < map.grid.phi.size(); ++b) {
      csv.row(std::vector<double>{map.grid.theta(a), map.grid.phi(b), map.values(a, b)});
    }
  }
  return csv.str();
}

std::string distribution_csv(const SpinOps& ops, const QuditState& state) {
  CsvWriter csv({"m", "p_y"});
  const Eigen::VectorXd p = readout_distribution(ops, state, Axis::kY);
  for (int i = 0; i < ops.spin.dim(); ++i) csv.row(std::vector<double>{ops.spin.m(i), p(i)});
  return csv.str();
}

ScriptedProtocol scripted_for(const SpinOps& ops, const EnvConfig& env) {
  ScriptedSearch search;
  search.n_steps = env.n_steps;
  search.chi_total = env.chi_total;
  search.threshold_xi2 = resolve_xi2_ref(env);
  return scripted_protocol(ops, search);
}

int cmd_benchmark(const Options& opt) {
  const Context ctx = make_context(opt);
  const SpinOps ops = build_spin_ops(ctx.config.env.spin);
  const BenchmarkResult oat = oat_benchmark(ops, 1.0);
  const BenchmarkResult tact = tact_benchmark(ops, 1.0);
  const BenchmarkResult tact_full =
      tact_benchmark(ops, 1.0, 2000, TactNormalization::kAnticommutator);
  json j = {
      {"spin", ctx.config.env.spin.to_string()},
      {"oat", {{"chi_t", oat.chi_t}, {"xi2", oat.xi2}, {"xi2_db", num(oat.xi2_db)}}},
      {"tact", {{"chi_t", tact.chi_t}, {"xi2", tact.xi2}, {"xi2_db", num(tact.xi2_db)}}},
      {"tact_anticommutator",
       {{"chi_t", tact_full.chi_t}, {"xi2", tact_full.xi2}, {"xi2_db", num(tact_full.xi2_db)}}},
  };
  ResultBundle bundle(ctx.out, "benchmark", ctx.hash, ctx.config.seed);
  bundle.write("benchmark.json", j.dump(1) + "\n");
  CsvWriter csv({"benchmark", "chi_t", "xi2", "xi2_db"});
  csv.row({"oat", format_double(oat.chi_t), format_double(oat.xi2), format_double(oat.xi2_db)});
  csv.row({"tact", format_double(tact.chi_t), format_double(tact.xi2), format_double(tact.xi2_db)});
  bundle.write("benchmark.csv", csv.str());
  bundle.finalize();
  std::cout << "OAT  xi2_min = " << oat.xi2_db << " dB at chi t = " << oat.chi_t << "\n"
            << "TACT xi2_min = " << tact.xi2_db << " dB at chi t = " << tact.chi_t << "\n";
  return 0;
}

std::string episode_csv(const EpisodeRecord& ep) {
  CsvWriter csv({"step", "action", "label", "reward", "xi2", "xi2_db", "xi2_y", "xi2_y_db"});
  const auto& table = action_table();
  for (std::size_t k = 0; k < ep.actions.size(); ++k) {
    csv.row({std::to_string(k), std::to_string(ep.actions[k]), table[ep.actions[k]].label,
             format_double(ep.rewards[k]), format_double(ep.xi2[k]),
             format_double(std::isfinite(ep.xi2[k]) ? to_db(ep.xi2[k]) : NAN),
             format_double(ep.xi2_y[k]),
             format_double(std::isfinite(ep.xi2_y[k]) ? to_db(ep.xi2_y[k]) : NAN)});
  }
  return csv.str();
}

json episode_summary(const EpisodeRecord& ep) {
  json labels = json::array();
  for (int a : ep.actions) labels.push_back(action_table()[a].label);
  return {{"k_star", ep.k_star ? json(*ep.k_star) : json(nullptr)},
          {"min_xi2_db", num(ep.min_xi2_db())},
          {"post_hit_xi2_y_db", num(ep.post_hit_xi2_y_db())},
          {"post_hit_ry_fraction", num(ep.post_hit_ry_fraction())},
          {"return", num(ep.total_return)},
          {"actions", ep.actions},
          {"labels", labels}};
}

int cmd_train(const Options& opt) {
  const Context ctx = make_context(opt);
  ResultBundle bundle(ctx.out, "train", ctx.hash, ctx.config.seed);
  std::string log;
  TrainOptions options;
  options.on_iteration = [&](const TrainLogEntry& e) {
    log += log_line(e) + "\n";
    std::cout << "iter " << e.iteration << " steps " << e.env_steps << " return " << e.mean_return
              << " greedy min xi2 " << e.greedy_min_xi2_db << " dB\n";
  };
  const TrainResult result = train(ctx.config.env, ctx.config.ppo, ctx.config.seed, options);
  bundle.write("train_log.jsonl", log);
  Checkpoint ckpt{result.nets.actor, result.nets.critic, ctx.config.seed, ctx.hash,
                  ctx.config.env.spin.twice()};
  bundle.write("checkpoint.json", checkpoint_json(ckpt) + "\n");
  bundle.write("greedy_episode.csv", episode_csv(result.greedy));
  bundle.write("greedy_episode.json", episode_summary(result.greedy).dump(1) + "\n");
  bundle.finalize();
  if (result.aborted) {
    throw Error(ErrorCode::kNonFinite, "training aborted (" + result.abort_reason +
                                           "); last good checkpoint written");
  }
  std::cout << "greedy episode: min xi2 " << result.greedy.min_xi2_db() << " dB, post-hit xi_y2 "
            << result.greedy.post_hit_xi2_y_db() << " dB\n";
  return 0;
}

// Loads the checkpoint and resolves the spin it is evaluated at.
struct LoadedPolicy {
  Checkpoint ckpt;
  EnvConfig env;
};

LoadedPolicy load_policy(const Options& opt, const Context& ctx, const char* command) {
  if (opt.checkpoint.empty()) {
    throw Error(ErrorCode::kMissingPrerequisite,
                std::string(command) +
                    " needs --checkpoint; produce one with `squeeze train --out DIR`");
  }
  LoadedPolicy lp{load_checkpoint(opt.checkpoint), ctx.config.env};
  if (!opt.transfer_f.empty()) {
    lp.env.spin = parse_spin(opt.transfer_f);
    lp.env.xi2_ref_db.reset();
  } else if (lp.ckpt.spin_twice != ctx.config.env.spin.twice()) {
    throw Error(ErrorCode::kCheckpointMismatch,
                "checkpoint trained at f = " + SpinQuantum::from_twice(lp.ckpt.spin_twice).to_string() +
                    ", config has f = " + ctx.config.env.spin.to_string() +
                    "; pass --transfer-f to evaluate anyway");
  }
  return lp;
}

int cmd_evaluate(const Options& opt) {
  const Context ctx = make_context(opt);
  const LoadedPolicy lp = load_policy(opt, ctx, "evaluate");
  SqueezeEnv env(lp.env);
  const EpisodeRecord ep = greedy_episode(lp.ckpt.actor, env);
  ResultBundle bundle(ctx.out, "evaluate", ctx.hash, ctx.config.seed);
  json summary = episode_summary(ep);
  summary["spin"] = lp.env.spin.to_string();
  summary["transfer"] = !opt.transfer_f.empty();
  summary["checkpoint_config_hash"] = lp.ckpt.config_hash;
  bundle.write("episode.csv", episode_csv(ep));
  bundle.write("episode.json", summary.dump(1) + "\n");
  const SpinOps& ops = env.actions().ops;
  const SphereGrid grid = SphereGrid::uniform(ctx.config.evaluate.wigner_theta_points,
                                              ctx.config.evaluate.wigner_phi_points);
  for (int k : ctx.config.evaluate.wigner_steps) {
    if (k >= static_cast<int>(ep.states.size())) continue;
    bundle.write("wigner_step" + std::to_string(k) + ".csv",
                 wigner_csv(wigner_map(ops, ep.states[k], grid)));
  }
  bundle.finalize();
  std::cout << "f = " << lp.env.spin.to_string() << ": min xi2 " << ep.min_xi2_db()
            << " dB, post-hit xi_y2 " << ep.post_hit_xi2_y_db() << " dB, R_y(pi/2) share "
            << ep.post_hit_ry_fraction() << "\n";
  return 0;
}

int cmd_metrology(const Options& opt) {
  const Context ctx = make_context(opt);
  const auto& cfg = ctx.config;
  const auto& m = cfg.metrology;
  const SpinOps ops = build_spin_ops(cfg.env.spin);
  const double chi_dt = cfg.env.chi_dt();
  const double dt = chi_dt / m.field.chi;

  RlProbe probe;
  if (m.rl_probe == "policy") {
    const LoadedPolicy lp = load_policy(opt, ctx, "metrology (rl_probe = policy)");
    SqueezeEnv env(lp.env);
    const EpisodeRecord ep = greedy_episode(lp.ckpt.actor, env);
    if (!ep.k_star) {
      throw Error(ErrorCode::kMissingPrerequisite,
                  "policy never reaches the squeezing threshold; retrain or set "
                  "metrology.rl_probe = scripted");
    }
    probe = rl_probe(ep.states, ep.actions, *ep.k_star);
  } else {
    const ScriptedProtocol sp = scripted_for(ops, cfg.env);
    if (sp.hit_step < 0) {
      throw Error(ErrorCode::kMissingPrerequisite, "scripted protocol never hit the threshold");
    }
    probe = {sp.trajectory.states[sp.probe_step - 1], sp.probe_step};
  }
  const QuditState aligned = aligned_tact_state(ops);

  PhaseSweepOptions po;
  po.chi_dt = chi_dt;
  po.de = cfg.de.de;
  const int n_max = std::max(1, static_cast<int>(std::floor(m.chi_t_max / chi_dt + 1e-9)));
  for (int n = 1; n <= n_max; ++n) po.n_e.push_back(n);
  PhaseSweepOptions rx_po = po;
  rx_po.n_e.resize(std::min<std::size_t>(po.n_e.size(), m.rx_dd_max_n_e));

  const auto rl_rows = phase_sweep(ops, probe.state, EncodingProtocol::kRlStabilized, po);
  const auto free_rows = phase_sweep(ops, aligned, EncodingProtocol::kFreeQze, po);
  const auto rx_rows = phase_sweep(ops, aligned, EncodingProtocol::kRxDd, rx_po);

  FieldSweepOptions fo;
  fo.t_p = probe.steps * dt;
  fo.dt = dt;
  fo.de = cfg.de.de;
  for (int k = 0; k < m.t_tot_points; ++k) {
    const double s = m.t_tot_points == 1 ? 0.0 : static_cast<double>(k) / (m.t_tot_points - 1);
    fo.t_tot.push_back(m.t_tot_min_s + s * (m.t_tot_max_s - m.t_tot_min_s));
  }
  const auto field_rows = field_sweep(ops, probe.state, EncodingProtocol::kRlStabilized,
                                      m.field, fo);

  ResultBundle bundle(ctx.out, "metrology", ctx.hash, cfg.seed);
  CsvWriter phase({"protocol", "n_e", "chi_t", "delta_phi", "sql_gain_db"});
  CsvWriter plot({"x", "y", "series"});
  auto add_phase = [&](const char* name, const std::vector<PhaseSweepRow>& rows) {
    for (const auto& r : rows) {
      phase.row({name, std::to_string(r.n_e), format_double(r.chi_t), format_double(r.delta_phi),
                 format_double(r.gain_db)});
      plot.row({format_double(r.chi_t), format_double(r.gain_db), std::string("phase_") + name});
    }
  };
  add_phase("rl-stabilized", rl_rows);
  add_phase("free-qze", free_rows);
  add_phase("rx-dd", rx_rows);
  CsvWriter field({"t_tot_s", "t_p_s", "t_e_s", "n_e", "delta_phi", "delta_b_t_per_sqrt_hz",
                   "delta_b_sql_t_per_sqrt_hz", "sql_ratio_db"});
  for (const auto& r : field_rows) {
    field.row({format_double(r.t_tot), format_double(r.t_p), format_double(r.t_e),
               std::to_string(r.n_e), format_double(r.delta_phi), format_double(r.delta_b),
               format_double(r.delta_b_sql), format_double(r.sql_ratio_db)});
    plot.row({format_double(r.t_tot), format_double(r.delta_b), "field_rl-stabilized"});
    plot.row({format_double(r.t_tot), format_double(r.delta_b_sql), "field_sql"});
  }
  auto opt_json = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json summary = {
      {"probe", m.rl_probe},
      {"t_p_s", fo.t_p},
      {"dt_s", dt},
      {"probe_xi2_y_db", num(squeezing_report(ops, probe.state).xi2_y_db)},
      {"free_qze_sql_crossing_chi_t", opt_json(sql_crossing_down(free_rows))},
      {"rx_dd_sql_crossing_chi_t", opt_json(sql_crossing_down(rx_rows))},
      {"rl_sql_crossing_chi_t", opt_json(sql_crossing_down(rl_rows))},
      {"rl_field_sql_crossing_s", opt_json(sql_crossing_up(field_rows))},
      {"rl_delta_b_at_max_t_tot", num(field_rows.back().delta_b)},
      {"rl_sql_ratio_db_at_max_t_tot", num(field_rows.back().sql_ratio_db)},
  };
  bundle.write("phase_sweep.csv", phase.str());
  bundle.write("field_sweep.csv", field.str());
  bundle.write("plot_data.csv", plot.str());
  bundle.write("metrology.json", summary.dump(1) + "\n");
  bundle.write("probe_readout.csv", distribution_csv(ops, probe.state));
  bundle.finalize();
  std::cout << summary.dump(1) << "\n";
  return 0;
}

int cmd_hyperfine(const Options& opt) {
  const Context ctx = make_context(opt);
  const auto& h = ctx.config.hyperfine;
  const SpinQuantum f = SpinQuantum::from_twice(h.atom.i.twice() + h.atom.j.twice());
  std::vector<double> fields;
  for (int k = 0; k < h.sweep_points; ++k) {
    const double s = static_cast<double>(k) / (h.sweep_points - 1);
    fields.push_back(h.sweep_min_tesla * std::pow(h.sweep_max_tesla / h.sweep_min_tesla, s));
  }
  const auto rows = hyperfine_sweep(h.atom, f, fields);
  const ManifoldSpectrum spectrum = label_manifold(h.atom, h.b_field_tesla, f);
  const QuadraticFit fit = fit_quadratic(spectrum);
  const double two_pi = 2.0 * std::numbers::pi;

  ResultBundle bundle(ctx.out, "hyperfine", ctx.hash, ctx.config.seed);
  CsvWriter csv({"b_tesla", "omega_l_rad_per_s", "chi_rad_per_s", "residual_rms_hz", "min_overlap"});
  for (const auto& r : rows) {
    csv.row(std::vector<double>{r.b_field, r.fit.omega_l, r.fit.chi, r.fit.residual_rms_hz,
                                r.min_overlap});
  }
  CsvWriter levels({"m", "energy_hz", "overlap"});
  for (const auto& l : spectrum.levels) levels.row(std::vector<double>{l.m, l.energy_hz, l.overlap});
  json summary = {
      {"f", f.to_string()},
      {"quadrupole_form", to_string(h.atom.quadrupole)},
      {"b_tesla", h.b_field_tesla},
      {"omega_l_over_2pi_hz", fit.omega_l / two_pi},
      {"chi_over_2pi_hz", fit.chi / two_pi},
      {"gamma_over_2pi_hz_per_tesla",
       h.b_field_tesla > 0 ? json(fit.omega_l / h.b_field_tesla / two_pi) : json(nullptr)},
      {"residual_rms_hz", fit.residual_rms_hz},
      {"chi_field_exponent", power_law_exponent(rows)},
  };
  bundle.write("hyperfine.csv", csv.str());
  bundle.write("hyperfine_levels.csv", levels.str());
  bundle.write("hyperfine.json", summary.dump(1) + "\n");
  bundle.finalize();
  std::cout << summary.dump(1) << "\n";
  return 0;
}

int cmd_de(const Options& opt) {
  const Context ctx = make_context(opt);
  const SpinOps ops = build_spin_ops(ctx.config.env.spin);
  DeConfig de = ctx.config.de.de;
  if (opt.seed) de.seed = *opt.seed;
  const RxContext rx = RxContext::make(ops, aligned_tact_state(ops), ctx.config.env.chi_dt());
  const DeResult result = de_optimize(de, rx, ctx.config.de.n_e);
  const double zero_cost = de_cost(rx, RxSchedule{std::vector<int>(ctx.config.de.n_e, 0)});
  ResultBundle bundle(ctx.out, "de-optimize", ctx.hash, ctx.config.seed);
  bundle.write("de_schedule.json", schedule_json(result.best, result.best_cost) + "\n");
  CsvWriter csv({"generation", "best_cost", "best_cost_db"});
  for (std::size_t g = 0; g < result.convergence.size(); ++g) {
    csv.row(std::vector<double>{static_cast<double>(g), result.convergence[g],
                                to_db(result.convergence[g])});
  }
  bundle.write("de_convergence.csv", csv.str());
  bundle.finalize();
  std::cout << "best cost " << to_db(result.best_cost) << " dB (all-zero schedule "
            << to_db(zero_cost) << " dB)\n";
  return 0;
}

int cmd_fidelity(const Options& opt) {
  const Context ctx = make_context(opt);
  const SpinOps ops = build_spin_ops(ctx.config.env.spin);
  const ScriptedProtocol sp = scripted_for(ops, ctx.config.env);
  if (sp.hit_step < 0) {
    throw Error(ErrorCode::kMissingPrerequisite, "scripted protocol never hit the threshold");
  }
  const QuditState probe = sp.trajectory.states[sp.probe_step - 1];
  std::vector<double> times;
  for (int k = 0; k <= 300; ++k) times.push_back(k * 1e-3);
  const auto fy2 = fidelity_curve(ops, probe, FidelityGenerator::kFy2, times);
  const auto fz2 = fidelity_curve(ops, probe, FidelityGenerator::kFz2, times);
  // Stroboscopic toggling cycles against the effective fy^2 evolution.
  const double chi_dt = ctx.config.env.chi_dt();
  CsvWriter csv({"chi_t", "fidelity_fy2", "fidelity_fz2"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv.row(std::vector<double>{times[k], fy2[k], fz2[k]});
  }
  CsvWriter cycles({"cycles", "chi_t", "fidelity_to_probe"});
  QuditState psi = probe;
  for (int c = 0; c <= 40; ++c) {
    cycles.row(std::vector<double>{static_cast<double>(c), 2.0 * c * chi_dt, fidelity(psi, probe)});
    psi = toggling_cycle(ops, psi, 1.0, chi_dt);
  }
  ResultBundle bundle(ctx.out, "fidelity-study", ctx.hash, ctx.config.seed);
  bundle.write("fidelity.csv", csv.str());
  bundle.write("toggling_cycles.csv", cycles.str());
  bundle.finalize();
  std::cout << "fidelity at chi t = 0.3: fy^2 " << fy2.back() << ", fz^2 " << fz2.back() << "\n";
  return 0;
}

int cmd_wigner(const Options& opt) {
  const Context ctx = make_context(opt);
  const SpinOps ops = build_spin_ops(ctx.config.env.spin);
  const SphereGrid grid = SphereGrid::uniform(ctx.config.evaluate.wigner_theta_points,
                                              ctx.config.evaluate.wigner_phi_points);
  std::vector<std::pair<std::string, QuditState>> states = {
      {"css_x", css_x(ops)},
      {"oat_optimum", oat_benchmark(ops, 1.0).state},
      {"tact_optimum", tact_benchmark(ops, 1.0).state},
  };
  const ScriptedProtocol sp = scripted_for(ops, ctx.config.env);
  if (sp.hit_step >= 0) states.emplace_back("stabilized_probe", sp.trajectory.states[sp.probe_step - 1]);
  ResultBundle bundle(ctx.out, "wigner", ctx.hash, ctx.config.seed);
  const SphereGrid exact = SphereGrid::gauss_legendre(ops.spin.dim() + 1, 2 * ops.spin.dim() + 2);
  json summary = json::object();
  for (const auto& [name, state] : states) {
    bundle.write("wigner_" + name + ".csv", wigner_csv(wigner_map(ops, state, grid)));
    bundle.write("readout_" + name + ".csv", distribution_csv(ops, state));
    summary[name] = {{"sphere_integral", wigner_map(ops, state, exact).sphere_integral()}};
  }
  bundle.write("wigner.json", summary.dump(1) + "\n");
  bundle.finalize();
  std::cout << summary.dump(1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-squeezing control for a single atomic qudit"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "INI configuration file");
    sub->add_option("--seed", opt.seed, "override [run] seed");
    sub->add_option("--out", opt.out, "output directory (default: [output] dir)");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
    bool checkpoint;
  };
  const Command commands[] = {
      {"benchmark", "OAT and TACT squeezing benchmarks", cmd_benchmark, false},
      {"train", "train the PPO agent", cmd_train, false},
      {"evaluate", "greedy episode of a trained checkpoint", cmd_evaluate, true},
      {"metrology", "phase and field sensitivity sweeps", cmd_metrology, true},
      {"hyperfine", "hyperfine-Zeeman diagonalization and quadratic fit", cmd_hyperfine, false},
      {"de-optimize", "differential-evolution R_x dynamical decoupling", cmd_de, false},
      {"fidelity-study", "fidelity of the stabilized state under fy^2 and fz^2", cmd_fidelity, false},
      {"wigner", "spin Wigner maps of reference states", cmd_wigner, false},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    if (c.checkpoint) {
      sub->add_option("--checkpoint", opt.checkpoint, "checkpoint.json from `squeeze train`");
      sub->add_option("--transfer-f", opt.transfer_f, "evaluate the policy at another spin f");
    }
    sub->callback([&selected, run = c.run] { selected = run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error code=USAGE message=\"" << e.what() << "\"\n";
    return 64;
  }
  try {
    return selected(opt);
  } catch (const Error& e) {
    std::cerr << "error code=" << to_string(e.code()) << " message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error code=INTERNAL message=\"" << e.what() << "\"\n";
    return 3;
  }
}
