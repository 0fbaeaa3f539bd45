#ifndef QSQ_DE_HPP_
#define QSQ_DE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qsq/spin.hpp"

namespace qsq {

// Per-step R_x angles on the grid beta = n pi / 48, n in 0..16.
struct RxSchedule {
  static constexpr int kMaxIndex = 16;
  std::vector<int> n;

  double beta(std::size_t k) const;
  std::vector<double> betas() const;
};

struct DeConfig {
  int population = 32;
  double mutation = 0.5;   // F
  double crossover = 0.9;  // CR
  int generations = 300;
  std::uint64_t seed = 1;

  friend bool operator==(const DeConfig&, const DeConfig&) = default;
};

void validate(const DeConfig& config);

// Everything a rollout needs; rotations are precomputed for every grid index.
struct RxContext {
  const SpinOps* ops = nullptr;
  QuditState initial;
  double chi_dt = 0.0;
  std::array<ComplexMatrix, RxSchedule::kMaxIndex + 1> rotations;

  static RxContext make(const SpinOps& ops, const QuditState& initial, double chi_dt);
};

// TACT-optimal state rotated about x so that xi_y^2 equals xi^2.
QuditState aligned_tact_state(const SpinOps& ops);

struct RxTrajectory {
  std::vector<QuditState> states;  // after each step
  std::vector<double> xi2;
  std::vector<double> xi2_y;       // NaN where the readout axis degenerates
};

// |psi_{k+1}> = exp(-i chi dt fz^2) R_x(beta_k) |psi_k>
RxTrajectory rx_rollout(const RxContext& ctx, const RxSchedule& schedule);

inline constexpr double kDegenerateStepCost = 10.0;

// Mean per-step xi_y^2 (linear); degenerate steps count as kDegenerateStepCost.
double de_cost(const RxTrajectory& trajectory);
double de_cost(const RxContext& ctx, const RxSchedule& schedule);

struct DeResult {
  RxSchedule best;
  double best_cost = 0.0;
  std::vector<double> convergence;  // best cost after each generation
};

// rand/1/bin over [0,16]^n_e; vectors are rounded to the grid when evaluated.
// The zero vector is part of the initial population.
DeResult de_optimize(const DeConfig& config, const RxContext& ctx, int n_e);

std::string schedule_json(const RxSchedule& schedule, double cost);

}  // namespace qsq

#endif  // QSQ_DE_HPP_
