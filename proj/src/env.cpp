#include "qsq/env.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "qsq/protocol.hpp"

namespace qsq {

const std::array<ActionSpec, kNumActions>& action_table() {
  static const std::array<ActionSpec, kNumActions> table = [] {
    std::array<ActionSpec, kNumActions> t;
    t[0] = {std::nullopt, "I"};
    const double pi = std::numbers::pi;
    const std::array<std::pair<double, const char*>, 6> angles = {{
        {pi / 2, "+pi/2"}, {-pi / 2, "-pi/2"}, {pi / 3, "+pi/3"},
        {-pi / 3, "-pi/3"}, {pi / 4, "+pi/4"}, {-pi / 4, "-pi/4"},
    }};
    for (int i = 0; i < 6; ++i) {
      t[1 + i] = {RotationPulse{Axis::kX, angles[i].first},
                  std::string("Rx(") + angles[i].second + ")"};
      t[7 + i] = {RotationPulse{Axis::kY, angles[i].first},
                  std::string("Ry(") + angles[i].second + ")"};
    }
    return t;
  }();
  return table;
}

bool is_ry_half_pi(int action) { return action == 7 || action == 8; }

void validate(const EnvConfig& config) {
  const auto& r = config.reward;
  if (config.n_steps < 1) throw Error(ErrorCode::kConfig, "n_steps must be >= 1");
  if (!(config.chi_total > 0.0)) throw Error(ErrorCode::kConfig, "chi_T must be positive");
  if (r.zeta < 0 || r.kappa < 0 || r.alpha < 0 || r.action_cost < 0) {
    throw Error(ErrorCode::kConfig, "reward weights must be non-negative");
  }
  if (config.xi2_ref_db && !(*config.xi2_ref_db < 0.0)) {
    throw Error(ErrorCode::kConfig, "xi2_ref_db must be negative (0 < xi2_ref < 1)");
  }
}

double resolve_xi2_ref(const EnvConfig& config) {
  if (config.xi2_ref_db) return from_db(*config.xi2_ref_db);
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(config.spin.twice());
  if (it == cache.end()) {
    const SpinOps ops = build_spin_ops(config.spin);
    const double value = tact_benchmark(ops, 1.0).xi2;
    if (!(value < 1.0)) {
      throw Error(ErrorCode::kConfig, "TACT benchmark gives no squeezing for f = " +
                                          config.spin.to_string() + "; set xi2_ref_db");
    }
    it = cache.emplace(config.spin.twice(), value).first;
  }
  return it->second;
}

std::shared_ptr<const ActionSet> ActionSet::build(SpinQuantum spin, double chi_dt) {
  auto set = std::make_shared<ActionSet>();
  set->ops = build_spin_ops(spin);
  const auto& table = action_table();
  const int d = spin.dim();
  for (int a = 0; a < kNumActions; ++a) {
    set->unitaries[a] = table[a].pulse ? rotation_unitary(set->ops, *table[a].pulse)
                                       : ComplexMatrix(ComplexMatrix::Identity(d, d));
  }
  set->qze = make_qze(set->ops, 1.0, chi_dt);
  set->initial = css_x(set->ops);
  return set;
}

SqueezeEnv::SqueezeEnv(const EnvConfig& config)
    : SqueezeEnv(config, ActionSet::build(config.spin, config.chi_dt()), resolve_xi2_ref(config)) {}

SqueezeEnv::SqueezeEnv(const EnvConfig& config, std::shared_ptr<const ActionSet> actions,
                       double xi2_ref)
    : config_(config), actions_(std::move(actions)), xi2_ref_(xi2_ref) {
  validate(config_);
  if (!(xi2_ref_ > 0.0 && xi2_ref_ < 1.0)) {
    throw Error(ErrorCode::kConfig, "xi2_ref must lie in (0, 1)");
  }
  if (!(actions_->ops.spin == config_.spin)) {
    throw Error(ErrorCode::kDimensionMismatch, "action set built for a different spin");
  }
}

Observation SqueezeEnv::reset() {
  episode_ = EpisodeState{};
  episode_.qudit = actions_->initial;
  done_ = false;
  return observe(actions_->ops, episode_.qudit);
}

double action_cost(const RewardConfig& reward, int action) {
  return action == 0 ? 0.0 : reward.action_cost;
}

StepResult SqueezeEnv::step(int action) {
  if (done_) throw Error(ErrorCode::kContractViolation, "step called on a finished episode");
  if (action < 0 || action >= kNumActions) {
    throw Error(ErrorCode::kInvalidArgument, "action index out of range: " + std::to_string(action));
  }
  auto& ep = episode_;
  if (action != 0) ep.qudit = actions_->unitaries[action] * ep.qudit;
  apply_qze_inplace(ep.qudit, actions_->qze);

  const SpinMoments mom = spin_moments(actions_->ops, ep.qudit);
  StepResult out;
  out.report = squeezing_report(mom, config_.spin);
  out.observation = observe(mom, config_.spin);
  const double cost = action_cost(config_.reward, action);
  const auto& r = config_.reward;

  if (!ep.hit) {
    if (!out.report.mean_spin_defined) {
      out.reward = r.degenerate_penalty;
      out.degenerate = true;
    } else if (out.report.xi2 <= xi2_ref_) {
      ep.hit = true;
      ep.k_star = ep.k;
      out.hit_now = true;
      out.reward = r.zeta * std::exp(-r.kappa * ep.k) - cost;
    } else {
      out.reward = std::log(ep.prev_xi2) - std::log(out.report.xi2) - cost;
    }
  } else if (!out.report.readout_defined) {
    out.reward = r.degenerate_penalty;
    out.degenerate = true;
  } else {
    out.reward = -r.alpha * std::log(out.report.xi2_y) - cost;
  }
  if (out.report.mean_spin_defined) ep.prev_xi2 = out.report.xi2;

  ++ep.k;
  done_ = ep.k >= config_.n_steps;
  out.done = done_;
  return out;
}

double cumulative_return(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= gamma;
  }
  return total;
}

}  // namespace qsq
