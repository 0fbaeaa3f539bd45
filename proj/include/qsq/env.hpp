#ifndef QSQ_ENV_HPP_
#define QSQ_ENV_HPP_

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsq/metrics.hpp"
#include "qsq/spin.hpp"

namespace qsq {

inline constexpr int kNumActions = 13;

// Index 0 is the identity; 1..6 are R_x(b), 7..12 are R_y(b) with
// b = +pi/2, -pi/2, +pi/3, -pi/3, +pi/4, -pi/4.
struct ActionSpec {
  std::optional<RotationPulse> pulse;
  std::string label;
};

const std::array<ActionSpec, kNumActions>& action_table();

bool is_ry_half_pi(int action);

struct RewardConfig {
  double zeta = 5.0;
  double kappa = 0.05;
  double alpha = 0.05;
  double action_cost = 0.001;
  double degenerate_penalty = -10.0;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

struct EnvConfig {
  SpinQuantum spin = SpinQuantum::from_twice(21);
  int n_steps = 70;
  double chi_total = 0.314;        // chi T over the episode
  RewardConfig reward;
  std::optional<double> xi2_ref_db;  // unset: TACT benchmark for this spin

  double chi_dt() const { return chi_total / n_steps; }

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

void validate(const EnvConfig& config);

// Linear threshold; the TACT benchmark is computed once per spin and cached.
double resolve_xi2_ref(const EnvConfig& config);

// Immutable per-spin data shared by environment instances.
struct ActionSet {
  SpinOps ops;
  std::array<ComplexMatrix, kNumActions> unitaries;  // identity at index 0
  QzePropagator qze;
  QuditState initial;

  static std::shared_ptr<const ActionSet> build(SpinQuantum spin, double chi_dt);
};

struct EpisodeState {
  int k = 0;
  bool hit = false;
  std::optional<int> k_star;
  double prev_xi2 = 1.0;
  QuditState qudit;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  bool degenerate = false;
  bool hit_now = false;
  SqueezingReport report;
};

class SqueezeEnv {
 public:
  explicit SqueezeEnv(const EnvConfig& config);
  SqueezeEnv(const EnvConfig& config, std::shared_ptr<const ActionSet> actions, double xi2_ref);

  Observation reset();
  StepResult step(int action);

  const EpisodeState& episode() const { return episode_; }
  const EnvConfig& config() const { return config_; }
  const ActionSet& actions() const { return *actions_; }
  double xi2_ref() const { return xi2_ref_; }

 private:
  EnvConfig config_;
  std::shared_ptr<const ActionSet> actions_;
  double xi2_ref_ = 0.0;
  EpisodeState episode_;
  bool done_ = true;
};

double action_cost(const RewardConfig& reward, int action);

double cumulative_return(std::span<const double> rewards, double gamma);

}  // namespace qsq

#endif  // QSQ_ENV_HPP_
