#include "qsq/de.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"

#include "qsq/error.hpp"
#include "qsq/metrics.hpp"
#include "qsq/protocol.hpp"

namespace qsq {

double RxSchedule::beta(std::size_t k) const { return n.at(k) * std::numbers::pi / 48.0; }

std::vector<double> RxSchedule::betas() const {
  std::vector<double> out(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) out[k] = beta(k);
  return out;
}

void validate(const DeConfig& c) {
  if (c.population < 4) throw Error(ErrorCode::kConfig, "DE population must be >= 4");
  if (!(c.mutation > 0.0 && c.mutation <= 2.0)) {
    throw Error(ErrorCode::kConfig, "DE mutation factor must lie in (0, 2]");
  }
  if (!(c.crossover >= 0.0 && c.crossover <= 1.0)) {
    throw Error(ErrorCode::kConfig, "DE crossover rate must lie in [0, 1]");
  }
  if (c.generations < 0) throw Error(ErrorCode::kConfig, "DE generations must be >= 0");
}

RxContext RxContext::make(const SpinOps& ops, const QuditState& initial, double chi_dt) {
  require_same_dim(initial.size(), ops.spin.dim(), "rx context");
  RxContext ctx;
  ctx.ops = &ops;
  ctx.initial = initial;
  ctx.chi_dt = chi_dt;
  for (int i = 0; i <= RxSchedule::kMaxIndex; ++i) {
    ctx.rotations[i] = rotation_unitary(ops, {Axis::kX, i * std::numbers::pi / 48.0});
  }
  return ctx;
}

QuditState aligned_tact_state(const SpinOps& ops) {
  const BenchmarkResult tact = tact_benchmark(ops, 1.0);
  return align_to_y(ops, tact.state).state;
}

RxTrajectory rx_rollout(const RxContext& ctx, const RxSchedule& schedule) {
  const QzePropagator qze = make_qze(*ctx.ops, 1.0, ctx.chi_dt);
  RxTrajectory out;
  QuditState psi = ctx.initial;
  for (int idx : schedule.n) {
    if (idx < 0 || idx > RxSchedule::kMaxIndex) {
      throw Error(ErrorCode::kInvalidArgument, "R_x grid index out of range: " + std::to_string(idx));
    }
    if (idx != 0) psi = ctx.rotations[idx] * psi;
    apply_qze_inplace(psi, qze);
    const SqueezingReport rep = squeezing_report(*ctx.ops, psi);
    out.states.push_back(psi);
    out.xi2.push_back(rep.xi2);
    out.xi2_y.push_back(rep.xi2_y);
  }
  return out;
}

double de_cost(const RxTrajectory& trajectory) {
  if (trajectory.xi2_y.empty()) throw Error(ErrorCode::kInvalidArgument, "empty rollout");
  double sum = 0.0;
  for (double x : trajectory.xi2_y) sum += std::isfinite(x) ? x : kDegenerateStepCost;
  return sum / static_cast<double>(trajectory.xi2_y.size());
}

double de_cost(const RxContext& ctx, const RxSchedule& schedule) {
  return de_cost(rx_rollout(ctx, schedule));
}

namespace {

RxSchedule round_to_grid(const std::vector<double>& x) {
  RxSchedule s;
  s.n.reserve(x.size());
  for (double v : x) {
    s.n.push_back(std::clamp(static_cast<int>(std::lround(v)), 0, RxSchedule::kMaxIndex));
  }
  return s;
}

}  // namespace

DeResult de_optimize(const DeConfig& config, const RxContext& ctx, int n_e) {
  validate(config);
  if (n_e < 1) throw Error(ErrorCode::kInvalidArgument, "N_e must be >= 1");
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double hi = RxSchedule::kMaxIndex;
  const int np = config.population;

  std::vector<std::vector<double>> pop(np, std::vector<double>(n_e, 0.0));
  std::vector<double> cost(np);
  for (int i = 1; i < np; ++i) {
    for (double& v : pop[i]) v = hi * unit(rng);
  }
  for (int i = 0; i < np; ++i) cost[i] = de_cost(ctx, round_to_grid(pop[i]));

  auto best_index = [&] {
    return static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  };
  DeResult result;
  std::uniform_int_distribution<int> pick(0, np - 1);
  std::uniform_int_distribution<int> pick_dim(0, n_e - 1);
  std::vector<double> trial(n_e);
  for (int gen = 0; gen < config.generations; ++gen) {
    for (int i = 0; i < np; ++i) {
      int r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const int forced = pick_dim(rng);
      for (int j = 0; j < n_e; ++j) {
        if (j == forced || unit(rng) < config.crossover) {
          const double v = pop[r1][j] + config.mutation * (pop[r2][j] - pop[r3][j]);
          trial[j] = std::clamp(v, 0.0, hi);
        } else {
          trial[j] = pop[i][j];
        }
      }
      const double c = de_cost(ctx, round_to_grid(trial));
      if (c <= cost[i]) {
        pop[i] = trial;
        cost[i] = c;
      }
    }
    result.convergence.push_back(cost[best_index()]);
  }
  const int b = best_index();
  result.best = round_to_grid(pop[b]);
  result.best_cost = cost[b];
  return result;
}

std::string schedule_json(const RxSchedule& schedule, double cost) {
  nlohmann::json j = {{"n", schedule.n}, {"beta_rad", schedule.betas()}, {"cost", cost}};
  return j.dump(1);
}

}  // namespace qsq
