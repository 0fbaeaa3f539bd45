#ifndef QSQ_PPO_HPP_
#define QSQ_PPO_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qsq/env.hpp"
#include "qsq/mlp.hpp"

namespace qsq {

struct PpoConfig {
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  double gamma = 0.9999;
  double gae_lambda = 0.96;
  double clip_eps = 0.2;
  double value_weight = 0.5;     // c1
  double entropy_weight = 0.01;  // c2
  int minibatch = 512;
  int epochs = 8;
  long max_env_steps = 8'000'000;
  int buffer_size = 17920;
  std::vector<int> hidden = {128, 128};
  bool normalize_advantages = true;
  double hidden_gain = 1.4142135623730951;
  double actor_output_gain = 0.01;
  double critic_output_gain = 1.0;

  friend bool operator==(const PpoConfig&, const PpoConfig&) = default;
};

void validate(const PpoConfig& config, const EnvConfig& env);

struct ActorCritic {
  Mlp actor;   // obs -> 13 logits
  Mlp critic;  // obs -> value
  Adam actor_opt;
  Adam critic_opt;

  static ActorCritic init(const PpoConfig& config, std::mt19937_64& rng);
};

// Columnwise softmax of logits (rows = actions).
Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits);
Eigen::MatrixXd policy_forward(const Mlp& actor, const Eigen::MatrixXd& obs);
Eigen::VectorXd policy_forward(const Mlp& actor, const Observation& obs);
double value_forward(const Mlp& critic, const Observation& obs);
double entropy(const Eigen::VectorXd& probs);

// Generalized advantage estimate over one episode; values[k] = V(o_k) and the
// value after the last step is `bootstrap`.
std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                double gamma, double lambda, double bootstrap = 0.0);
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

struct TrajectoryBuffer {
  Eigen::MatrixXd obs;  // Observation::kSize x capacity
  std::vector<int> actions;
  Eigen::VectorXd log_prob;
  Eigen::VectorXd rewards;
  Eigen::VectorXd values;
  std::vector<std::uint8_t> done;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
  int size = 0;

  explicit TrajectoryBuffer(int capacity = 0);
  int capacity() const { return static_cast<int>(actions.size()); }
  bool full() const { return size == capacity(); }
  void push(const Observation& o, int action, double logp, double reward, double value, bool d);
  // Fills advantages and returns episode by episode; episodes end at done rows.
  void finish(double gamma, double lambda);
};

struct LossReport {
  double actor_objective = 0.0;  // clipped surrogate, maximized
  double critic_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

struct Minibatch {
  Eigen::MatrixXd obs;
  std::vector<int> actions;
  Eigen::VectorXd old_log_prob;
  Eigen::VectorXd advantages;  // already normalized if requested
  Eigen::VectorXd returns;
};

struct LossGradient {
  LossReport report;
  Eigen::VectorXd actor_grad;
  Eigen::VectorXd critic_grad;
};

// Total loss -L_actor + c1 L_critic - c2 S on one minibatch and its gradient.
LossGradient ppo_loss(const ActorCritic& nets, const Minibatch& batch, const PpoConfig& config);

// Eight epochs of shuffled minibatch steps over a finished buffer. Throws
// kNonFinite on a NaN loss; parameters are left at their last finite values.
LossReport ppo_update(ActorCritic& nets, const TrajectoryBuffer& buffer, const PpoConfig& config,
                      std::mt19937_64& rng);

struct EpisodeRecord {
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> xi2;    // per step, NaN when undefined
  std::vector<double> xi2_y;  // per step, NaN when undefined
  std::vector<QuditState> states;  // after each step
  std::optional<int> k_star;
  double total_return = 0.0;

  double min_xi2_db() const;
  // Linear mean of xi_y^2 over steps after k*, in dB; NaN if never hit.
  double post_hit_xi2_y_db() const;
  // Share of R_y(+-pi/2) among non-identity actions after k*.
  double post_hit_ry_fraction() const;
};

EpisodeRecord greedy_episode(const Mlp& actor, SqueezeEnv& env);

struct TrainLogEntry {
  int iteration = 0;
  long env_steps = 0;
  double mean_return = 0.0;
  double best_xi2_db = 0.0;
  double mean_post_hit_xi2_y_db = 0.0;
  double hit_fraction = 0.0;
  double greedy_min_xi2_db = 0.0;
  double greedy_post_hit_xi2_y_db = 0.0;
  double greedy_ry_fraction = 0.0;
  LossReport loss;
};

struct StabilizationTarget {
  double min_xi2_db = -7.5;
  double post_hit_xi2_y_db = -4.0;
  double ry_fraction = 0.6;

  bool met(const EpisodeRecord& ep) const;
};

struct TrainOptions {
  std::optional<StabilizationTarget> stop_when;  // early stop on the greedy episode
  std::function<void(const TrainLogEntry&)> on_iteration;
};

struct TrainResult {
  ActorCritic nets;
  std::vector<TrainLogEntry> log;
  EpisodeRecord greedy;
  bool target_met = false;
  bool aborted = false;  // NaN loss; nets hold the last good parameters
  std::string abort_reason;
  std::uint64_t seed = 0;
};

TrainResult train(const EnvConfig& env_config, const PpoConfig& ppo_config, std::uint64_t seed,
                  const TrainOptions& options = {});

std::string log_line(const TrainLogEntry& entry);

struct Checkpoint {
  Mlp actor;
  Mlp critic;
  std::uint64_t seed = 0;
  std::string config_hash;
  int spin_twice = 21;
};

std::string checkpoint_json(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& text);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace qsq

#endif  // QSQ_PPO_HPP_
