#include "qsq/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "qsq/error.hpp"

namespace qsq {

namespace {

using json = nlohmann::json;

Eigen::VectorXd obs_column(const Observation& o) {
  const auto a = o.as_array();
  return Eigen::Map<const Eigen::VectorXd>(a.data(), Observation::kSize);
}

// log-softmax of one column, stable.
Eigen::VectorXd log_softmax(const Eigen::Ref<const Eigen::VectorXd>& z) {
  const double top = z.maxCoeff();
  const double lse = top + std::log((z.array() - top).exp().sum());
  return z.array() - lse;
}

int sample_categorical(const Eigen::VectorXd& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = uni(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs(i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

double nan_to_db(double linear) { return std::isfinite(linear) ? to_db(linear) : NAN; }

}  // namespace

void validate(const PpoConfig& c, const EnvConfig& env) {
  const bool positive = c.actor_lr > 0 && c.critic_lr > 0 && c.gamma > 0 && c.gae_lambda >= 0 &&
                        c.clip_eps > 0 && c.value_weight >= 0 && c.entropy_weight >= 0 &&
                        c.minibatch > 0 && c.epochs > 0 && c.max_env_steps > 0 &&
                        c.buffer_size > 0;
  if (!positive) throw Error(ErrorCode::kConfig, "PPO hyperparameters must be positive");
  if (!(c.clip_eps < 1.0)) throw Error(ErrorCode::kConfig, "clip_eps must be < 1");
  if (c.gamma > 1.0 || c.gae_lambda > 1.0) {
    throw Error(ErrorCode::kConfig, "gamma and lambda must not exceed 1");
  }
  if (c.buffer_size % env.n_steps != 0) {
    throw Error(ErrorCode::kConfig, "buffer_size must hold whole episodes of " +
                                        std::to_string(env.n_steps) + " steps");
  }
  for (int h : c.hidden) {
    if (h < 1) throw Error(ErrorCode::kConfig, "hidden layer widths must be positive");
  }
}

ActorCritic ActorCritic::init(const PpoConfig& config, std::mt19937_64& rng) {
  std::vector<int> actor_sizes{Observation::kSize};
  actor_sizes.insert(actor_sizes.end(), config.hidden.begin(), config.hidden.end());
  std::vector<int> critic_sizes = actor_sizes;
  actor_sizes.push_back(kNumActions);
  critic_sizes.push_back(1);
  ActorCritic nets;
  nets.actor = Mlp::orthogonal(actor_sizes, config.hidden_gain, config.actor_output_gain, rng);
  nets.critic = Mlp::orthogonal(critic_sizes, config.hidden_gain, config.critic_output_gain, rng);
  nets.actor_opt = Adam(nets.actor.num_params(), config.actor_lr);
  nets.critic_opt = Adam(nets.critic.num_params(), config.critic_lr);
  return nets;
}

Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    out.col(j) = log_softmax(logits.col(j)).array().exp();
  }
  return out;
}

Eigen::MatrixXd policy_forward(const Mlp& actor, const Eigen::MatrixXd& obs) {
  const Eigen::MatrixXd logits = actor.forward(obs);
  if (!logits.allFinite()) throw Error(ErrorCode::kNonFinite, "actor produced non-finite logits");
  return softmax(logits);
}

Eigen::VectorXd policy_forward(const Mlp& actor, const Observation& obs) {
  return policy_forward(actor, Eigen::MatrixXd(obs_column(obs))).col(0);
}

double value_forward(const Mlp& critic, const Observation& obs) {
  const double v = critic.forward(Eigen::MatrixXd(obs_column(obs)))(0, 0);
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "critic produced a non-finite value");
  return v;
}

double entropy(const Eigen::VectorXd& probs) {
  double s = 0.0;
  for (double p : probs) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                double gamma, double lambda, double bootstrap) {
  if (rewards.size() != values.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "compute_gae: rewards and values differ in length");
  }
  const std::size_t n = rewards.size();
  std::vector<double> adv(n);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next = (i + 1 < n) ? values[i + 1] : bootstrap;
    const double delta = rewards[i] + gamma * next - values[i];
    running = delta + gamma * lambda * running;
    adv[i] = running;
  }
  return adv;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size());
  double running = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    running = rewards[i] + gamma * running;
    out[i] = running;
  }
  return out;
}

TrajectoryBuffer::TrajectoryBuffer(int capacity)
    : obs(Observation::kSize, capacity), actions(capacity, 0), log_prob(capacity),
      rewards(capacity), values(capacity), done(capacity, 0), advantages(capacity),
      returns(capacity) {}

void TrajectoryBuffer::push(const Observation& o, int action, double logp, double reward,
                            double value, bool d) {
  if (full()) throw Error(ErrorCode::kContractViolation, "trajectory buffer is full");
  obs.col(size) = obs_column(o);
  actions[size] = action;
  log_prob(size) = logp;
  rewards(size) = reward;
  values(size) = value;
  done[size] = d ? 1 : 0;
  ++size;
}

void TrajectoryBuffer::finish(double gamma, double lambda) {
  int start = 0;
  for (int i = 0; i < size; ++i) {
    if (!done[i] && i + 1 < size) continue;
    if (!done[i]) throw Error(ErrorCode::kContractViolation, "buffer ends mid-episode");
    const int len = i + 1 - start;
    const std::span<const double> r(rewards.data() + start, len);
    const std::span<const double> v(values.data() + start, len);
    const auto adv = compute_gae(r, v, gamma, lambda, 0.0);
    const auto ret = discounted_returns(r, gamma);
    for (int j = 0; j < len; ++j) {
      advantages(start + j) = adv[j];
      returns(start + j) = ret[j];
    }
    start = i + 1;
  }
}

LossGradient ppo_loss(const ActorCritic& nets, const Minibatch& b, const PpoConfig& config) {
  const Eigen::Index n = b.obs.cols();
  if (n == 0 || static_cast<Eigen::Index>(b.actions.size()) != n || b.old_log_prob.size() != n ||
      b.advantages.size() != n || b.returns.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "ppo_loss: inconsistent minibatch");
  }
  Mlp::Tape actor_tape, critic_tape;
  const Eigen::MatrixXd logits = nets.actor.forward(b.obs, actor_tape);
  const Eigen::MatrixXd values = nets.critic.forward(b.obs, critic_tape);

  const double inv_n = 1.0 / static_cast<double>(n);
  const double eps = config.clip_eps;
  const double c2 = config.entropy_weight;
  Eigen::MatrixXd grad_logits(logits.rows(), n);
  Eigen::MatrixXd grad_values(1, n);
  LossReport rep;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd logp = log_softmax(logits.col(j));
    const Eigen::VectorXd p = logp.array().exp();
    const double s = -p.dot(logp);
    const int a = b.actions[j];
    const double ratio = std::exp(logp(a) - b.old_log_prob(j));
    const double adv = b.advantages(j);
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
    const bool active = unclipped <= clipped;
    rep.actor_objective += std::min(unclipped, clipped);
    rep.entropy += s;
    rep.approx_kl += b.old_log_prob(j) - logp(a);
    if (std::abs(ratio - 1.0) > eps) rep.clip_fraction += 1.0;

    // d(-surrogate)/dz = -A ratio (e_a - p) when the unclipped branch is active
    Eigen::VectorXd g = c2 * p.cwiseProduct(logp.array().matrix() + Eigen::VectorXd::Constant(p.size(), s));
    if (active) {
      const double w = adv * ratio;
      g += w * p;
      g(a) -= w;
    }
    grad_logits.col(j) = g * inv_n;

    const double err = values(0, j) - b.returns(j);
    rep.critic_loss += err * err;
    grad_values(0, j) = config.value_weight * 2.0 * err * inv_n;
  }
  rep.actor_objective *= inv_n;
  rep.entropy *= inv_n;
  rep.critic_loss *= inv_n;
  rep.approx_kl *= inv_n;
  rep.clip_fraction *= inv_n;
  rep.total = -rep.actor_objective + config.value_weight * rep.critic_loss - c2 * rep.entropy;

  LossGradient out;
  out.report = rep;
  out.actor_grad = Eigen::VectorXd::Zero(nets.actor.num_params());
  out.critic_grad = Eigen::VectorXd::Zero(nets.critic.num_params());
  nets.actor.backward(actor_tape, grad_logits, out.actor_grad);
  nets.critic.backward(critic_tape, grad_values, out.critic_grad);
  return out;
}

LossReport ppo_update(ActorCritic& nets, const TrajectoryBuffer& buffer, const PpoConfig& config,
                      std::mt19937_64& rng) {
  if (buffer.size == 0 || !buffer.full()) {
    throw Error(ErrorCode::kContractViolation, "ppo_update needs a full buffer");
  }
  const int n = buffer.size;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  LossReport mean;
  int batches = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += config.minibatch) {
      const int m = std::min(config.minibatch, n - start);
      Minibatch mb;
      mb.obs.resize(Observation::kSize, m);
      mb.actions.resize(m);
      mb.old_log_prob.resize(m);
      mb.advantages.resize(m);
      mb.returns.resize(m);
      for (int j = 0; j < m; ++j) {
        const int row = order[start + j];
        mb.obs.col(j) = buffer.obs.col(row);
        mb.actions[j] = buffer.actions[row];
        mb.old_log_prob(j) = buffer.log_prob(row);
        mb.advantages(j) = buffer.advantages(row);
        mb.returns(j) = buffer.returns(row);
      }
      if (config.normalize_advantages && m > 1) {
        const double mu = mb.advantages.mean();
        const double sd = std::sqrt((mb.advantages.array() - mu).square().mean());
        mb.advantages = (mb.advantages.array() - mu) / (sd + 1e-8);
      }
      const LossGradient lg = ppo_loss(nets, mb, config);
      if (!std::isfinite(lg.report.total) || !lg.actor_grad.allFinite() ||
          !lg.critic_grad.allFinite()) {
        throw Error(ErrorCode::kNonFinite, "PPO loss became non-finite at epoch " +
                                               std::to_string(epoch));
      }
      nets.actor_opt.step(nets.actor.params(), lg.actor_grad);
      nets.critic_opt.step(nets.critic.params(), lg.critic_grad);
      mean.actor_objective += lg.report.actor_objective;
      mean.critic_loss += lg.report.critic_loss;
      mean.entropy += lg.report.entropy;
      mean.total += lg.report.total;
      mean.approx_kl += lg.report.approx_kl;
      mean.clip_fraction += lg.report.clip_fraction;
      ++batches;
    }
  }
  const double inv = 1.0 / batches;
  mean.actor_objective *= inv;
  mean.critic_loss *= inv;
  mean.entropy *= inv;
  mean.total *= inv;
  mean.approx_kl *= inv;
  mean.clip_fraction *= inv;
  return mean;
}

double EpisodeRecord::min_xi2_db() const {
  double best = INFINITY;
  for (double x : xi2) {
    if (std::isfinite(x)) best = std::min(best, x);
  }
  return std::isfinite(best) ? to_db(best) : NAN;
}

double EpisodeRecord::post_hit_xi2_y_db() const {
  if (!k_star) return NAN;
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = *k_star + 1; k < xi2_y.size(); ++k) {
    sum += std::isfinite(xi2_y[k]) ? xi2_y[k] : 10.0;
    ++count;
  }
  return count > 0 ? to_db(sum / count) : NAN;
}

double EpisodeRecord::post_hit_ry_fraction() const {
  if (!k_star) return 0.0;
  int pulses = 0, ry = 0;
  for (std::size_t k = *k_star + 1; k < actions.size(); ++k) {
    if (actions[k] == 0) continue;
    ++pulses;
    if (is_ry_half_pi(actions[k])) ++ry;
  }
  return pulses > 0 ? static_cast<double>(ry) / pulses : 0.0;
}

bool StabilizationTarget::met(const EpisodeRecord& ep) const {
  const double lo = ep.min_xi2_db();
  const double post = ep.post_hit_xi2_y_db();
  return std::isfinite(lo) && std::isfinite(post) && lo <= min_xi2_db &&
         post <= post_hit_xi2_y_db && ep.post_hit_ry_fraction() >= ry_fraction;
}

EpisodeRecord greedy_episode(const Mlp& actor, SqueezeEnv& env) {
  EpisodeRecord rec;
  Observation obs = env.reset();
  for (;;) {
    const int a = argmax(policy_forward(actor, obs));
    const StepResult r = env.step(a);
    rec.actions.push_back(a);
    rec.rewards.push_back(r.reward);
    rec.xi2.push_back(r.report.xi2);
    rec.xi2_y.push_back(r.report.xi2_y);
    rec.states.push_back(env.episode().qudit);
    rec.total_return += r.reward;
    obs = r.observation;
    if (r.done) break;
  }
  rec.k_star = env.episode().k_star;
  return rec;
}

TrainResult train(const EnvConfig& env_config, const PpoConfig& config, std::uint64_t seed,
                  const TrainOptions& options) {
  validate(env_config);
  validate(config, env_config);
  std::mt19937_64 rng(seed);
  TrainResult result;
  result.seed = seed;
  result.nets = ActorCritic::init(config, rng);

  const auto actions = ActionSet::build(env_config.spin, env_config.chi_dt());
  const double xi2_ref = resolve_xi2_ref(env_config);
  const int n_steps = env_config.n_steps;
  const int n_envs = config.buffer_size / n_steps;
  std::vector<SqueezeEnv> envs;
  envs.reserve(n_envs);
  for (int e = 0; e < n_envs; ++e) envs.emplace_back(env_config, actions, xi2_ref);
  SqueezeEnv eval_env(env_config, actions, xi2_ref);

  TrajectoryBuffer buffer(config.buffer_size);
  const long iterations = std::max<long>(1, config.max_env_steps / config.buffer_size);
  long env_steps = 0;
  Eigen::MatrixXd obs(Observation::kSize, n_envs);
  std::vector<double> ep_return(n_envs), ep_min_xi2(n_envs);
  std::vector<std::vector<double>> ep_xi2_y(n_envs);

  for (long it = 0; it < iterations; ++it) {
    for (int e = 0; e < n_envs; ++e) {
      obs.col(e) = obs_column(envs[e].reset());
      ep_return[e] = 0.0;
      ep_min_xi2[e] = INFINITY;
      ep_xi2_y[e].assign(n_steps, NAN);
    }
    // Episode-major rows: env e, step k -> e * n_steps + k.
    for (int k = 0; k < n_steps; ++k) {
      const Eigen::MatrixXd logits = result.nets.actor.forward(obs);
      const Eigen::MatrixXd values = result.nets.critic.forward(obs);
      for (int e = 0; e < n_envs; ++e) {
        const Eigen::VectorXd logp = log_softmax(logits.col(e));
        const int a = sample_categorical(logp.array().exp().matrix(), rng);
        const StepResult r = envs[e].step(a);
        const int row = e * n_steps + k;
        buffer.obs.col(row) = obs.col(e);
        buffer.actions[row] = a;
        buffer.log_prob(row) = logp(a);
        buffer.rewards(row) = r.reward;
        buffer.values(row) = values(0, e);
        buffer.done[row] = r.done ? 1 : 0;
        obs.col(e) = obs_column(r.observation);
        ep_return[e] += r.reward;
        if (std::isfinite(r.report.xi2)) ep_min_xi2[e] = std::min(ep_min_xi2[e], r.report.xi2);
        ep_xi2_y[e][k] = r.report.xi2_y;
      }
    }
    buffer.size = config.buffer_size;
    env_steps += config.buffer_size;
    if (!buffer.values.allFinite()) {
      result.aborted = true;
      result.abort_reason = "critic produced non-finite values during rollout";
      break;
    }
    buffer.finish(config.gamma, config.gae_lambda);

    TrainLogEntry entry;
    entry.iteration = static_cast<int>(it);
    entry.env_steps = env_steps;
    double best = INFINITY, post_sum = 0.0;
    int hits = 0;
    for (int e = 0; e < n_envs; ++e) {
      entry.mean_return += ep_return[e] / n_envs;
      best = std::min(best, ep_min_xi2[e]);
      const auto& ks = envs[e].episode().k_star;
      if (!ks) continue;
      double s = 0.0;
      int c = 0;
      for (int k = *ks + 1; k < n_steps; ++k, ++c) {
        s += std::isfinite(ep_xi2_y[e][k]) ? ep_xi2_y[e][k] : 10.0;
      }
      if (c > 0) {
        post_sum += s / c;
        ++hits;
      }
    }
    entry.best_xi2_db = nan_to_db(best);
    entry.mean_post_hit_xi2_y_db = hits > 0 ? to_db(post_sum / hits) : NAN;
    entry.hit_fraction = static_cast<double>(hits) / n_envs;

    const ActorCritic last_good = result.nets;
    try {
      entry.loss = ppo_update(result.nets, buffer, config, rng);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNonFinite) throw;
      result.nets = last_good;
      result.aborted = true;
      result.abort_reason = err.what();
      break;
    }

    result.greedy = greedy_episode(result.nets.actor, eval_env);
    entry.greedy_min_xi2_db = result.greedy.min_xi2_db();
    entry.greedy_post_hit_xi2_y_db = result.greedy.post_hit_xi2_y_db();
    entry.greedy_ry_fraction = result.greedy.post_hit_ry_fraction();
    result.log.push_back(entry);
    if (options.on_iteration) options.on_iteration(entry);
    if (options.stop_when && options.stop_when->met(result.greedy)) {
      result.target_met = true;
      break;
    }
  }
  if (result.greedy.actions.empty()) result.greedy = greedy_episode(result.nets.actor, eval_env);
  if (!result.target_met && options.stop_when) {
    result.target_met = options.stop_when->met(result.greedy);
  }
  return result;
}

std::string log_line(const TrainLogEntry& e) {
  auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j = {
      {"iteration", e.iteration},
      {"env_steps", e.env_steps},
      {"mean_return", num(e.mean_return)},
      {"best_xi2_db", num(e.best_xi2_db)},
      {"mean_post_hit_xi2_y_db", num(e.mean_post_hit_xi2_y_db)},
      {"hit_fraction", num(e.hit_fraction)},
      {"greedy_min_xi2_db", num(e.greedy_min_xi2_db)},
      {"greedy_post_hit_xi2_y_db", num(e.greedy_post_hit_xi2_y_db)},
      {"greedy_ry_fraction", num(e.greedy_ry_fraction)},
      {"actor_objective", num(e.loss.actor_objective)},
      {"critic_loss", num(e.loss.critic_loss)},
      {"entropy", num(e.loss.entropy)},
      {"approx_kl", num(e.loss.approx_kl)},
      {"clip_fraction", num(e.loss.clip_fraction)},
  };
  return j.dump();
}

namespace {

json net_json(const Mlp& net) {
  json layers = json::array();
  for (int l = 0; l < net.num_layers(); ++l) {
    const auto w = net.weight(l);
    std::vector<double> flat;
    flat.reserve(w.size());
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    const auto b = net.bias(l);
    layers.push_back({{"rows", w.rows()},
                      {"cols", w.cols()},
                      {"weight", flat},
                      {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  return {{"sizes", net.sizes()}, {"activation", to_string(net.activation())}, {"layers", layers}};
}

Mlp net_from_json(const json& j) {
  Mlp net(j.at("sizes").get<std::vector<int>>(), parse_activation(j.at("activation")));
  const auto& layers = j.at("layers");
  if (static_cast<int>(layers.size()) != net.num_layers()) {
    throw Error(ErrorCode::kCheckpointMismatch, "checkpoint layer count disagrees with sizes");
  }
  for (int l = 0; l < net.num_layers(); ++l) {
    const auto& lj = layers[l];
    auto w = net.weight(l);
    auto b = net.bias(l);
    const auto flat = lj.at("weight").get<std::vector<double>>();
    const auto bias = lj.at("bias").get<std::vector<double>>();
    if (lj.at("rows").get<Eigen::Index>() != w.rows() ||
        lj.at("cols").get<Eigen::Index>() != w.cols() ||
        static_cast<Eigen::Index>(flat.size()) != w.size() ||
        static_cast<Eigen::Index>(bias.size()) != b.size()) {
      throw Error(ErrorCode::kCheckpointMismatch, "checkpoint layer " + std::to_string(l) +
                                                      " has the wrong shape");
    }
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[r * w.cols() + c];
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = bias[i];
  }
  if (!net.params().allFinite()) {
    throw Error(ErrorCode::kNonFinite, "checkpoint contains non-finite parameters");
  }
  return net;
}

}  // namespace

std::string checkpoint_json(const Checkpoint& ckpt) {
  json actions = json::array();
  for (const auto& spec : action_table()) actions.push_back(spec.label);
  json j = {
      {"format", "qsq-checkpoint/1"},
      {"seed", ckpt.seed},
      {"config_hash", ckpt.config_hash},
      {"spin_twice", ckpt.spin_twice},
      {"observation", {"mx", "my", "mz", "mxx", "myy"}},
      {"actions", actions},
      {"actor", net_json(ckpt.actor)},
      {"critic", net_json(ckpt.critic)},
  };
  return j.dump(1);
}

Checkpoint parse_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, std::string("unreadable checkpoint: ") + e.what());
  }
  try {
    if (j.at("format") != "qsq-checkpoint/1") {
      throw Error(ErrorCode::kCheckpointMismatch, "unknown checkpoint format");
    }
    Checkpoint ckpt;
    ckpt.seed = j.at("seed").get<std::uint64_t>();
    ckpt.config_hash = j.at("config_hash").get<std::string>();
    ckpt.spin_twice = j.at("spin_twice").get<int>();
    ckpt.actor = net_from_json(j.at("actor"));
    ckpt.critic = net_from_json(j.at("critic"));
    if (ckpt.actor.input_size() != Observation::kSize ||
        ckpt.actor.output_size() != kNumActions || ckpt.critic.input_size() != Observation::kSize ||
        ckpt.critic.output_size() != 1) {
      throw Error(ErrorCode::kCheckpointMismatch,
                  "checkpoint networks do not match the 5-moment observation / 13-action layout");
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << checkpoint_json(ckpt) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace qsq
