#include "qsq/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qsq/error.hpp"
#include "qsq/io.hpp"

namespace qsq {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void bad_value(const std::string& key, const std::string& text, const char* what) {
  throw Error(ErrorCode::kConfig, "key '" + key + "': cannot read '" + text + "' as " + what);
}

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
std::string format(int v) { return std::to_string(v); }
std::string format(long v) { return std::to_string(v); }
std::string format(std::uint64_t v) { return std::to_string(v); }
std::string format(bool v) { return v ? "true" : "false"; }
std::string format(const std::string& v) { return v; }
std::string format(SpinQuantum v) { return v.to_string(); }
std::string format(QuadrupoleForm v) { return to_string(v); }
std::string format(const std::vector<int>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, const char* what) {
  T v{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, text, what);
  return v;
}

void parse_into(double& out, const std::string& key, const std::string& text) {
  out = parse_number<double>(key, text, "a number");
}
void parse_into(int& out, const std::string& key, const std::string& text) {
  out = parse_number<int>(key, text, "an integer");
}
void parse_into(long& out, const std::string& key, const std::string& text) {
  out = parse_number<long>(key, text, "an integer");
}
void parse_into(std::uint64_t& out, const std::string& key, const std::string& text) {
  out = parse_number<std::uint64_t>(key, text, "a non-negative integer");
}
void parse_into(bool& out, const std::string& key, const std::string& text) {
  if (text == "true") out = true;
  else if (text == "false") out = false;
  else bad_value(key, text, "true/false");
}
void parse_into(std::string& out, const std::string&, const std::string& text) { out = text; }
void parse_into(SpinQuantum& out, const std::string& key, const std::string& text) {
  try {
    out = parse_spin(text);
  } catch (const Error&) {
    bad_value(key, text, "a spin (e.g. 21/2)");
  }
}
void parse_into(QuadrupoleForm& out, const std::string& key, const std::string& text) {
  try {
    out = parse_quadrupole_form(text);
  } catch (const Error&) {
    bad_value(key, text, "as-written/casimir");
  }
}
void parse_into(std::vector<int>& out, const std::string& key, const std::string& text) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_number<int>(key, item, "a comma-separated integer list"));
  }
}

struct Binding {
  std::string key;
  std::function<std::optional<std::string>(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Access>
Binding bind(std::string key, Access access) {
  return {key,
          [access](const RunConfig& c) -> std::optional<std::string> {
            return format(access(const_cast<RunConfig&>(c)));
          },
          [access, key](RunConfig& c, const std::string& text) { parse_into(access(c), key, text); }};
}

Binding bind_optional(std::string key, std::optional<double> EnvConfig::*member) {
  return {key,
          [member](const RunConfig& c) -> std::optional<std::string> {
            const auto& v = c.env.*member;
            return v ? std::optional<std::string>(format(*v)) : std::nullopt;
          },
          [member, key](RunConfig& c, const std::string& text) {
            double v = 0.0;
            parse_into(v, key, text);
            c.env.*member = v;
          }};
}

#define QSQ_FIELD(key, expr) bind(key, [](RunConfig& c) -> auto& { return expr; })

using Schema = std::vector<std::pair<std::string, std::vector<Binding>>>;

const Schema& schema() {
  static const Schema s = {
      {"run", {QSQ_FIELD("seed", c.seed)}},
      {"environment",
       {
           QSQ_FIELD("spin", c.env.spin),
           QSQ_FIELD("n_steps", c.env.n_steps),
           QSQ_FIELD("chi_t_total", c.env.chi_total),
           bind_optional("xi2_ref_db", &EnvConfig::xi2_ref_db),
           QSQ_FIELD("zeta", c.env.reward.zeta),
           QSQ_FIELD("kappa", c.env.reward.kappa),
           QSQ_FIELD("alpha", c.env.reward.alpha),
           QSQ_FIELD("action_cost", c.env.reward.action_cost),
           QSQ_FIELD("degenerate_penalty", c.env.reward.degenerate_penalty),
       }},
      {"ppo",
       {
           QSQ_FIELD("actor_lr", c.ppo.actor_lr),
           QSQ_FIELD("critic_lr", c.ppo.critic_lr),
           QSQ_FIELD("gamma", c.ppo.gamma),
           QSQ_FIELD("gae_lambda", c.ppo.gae_lambda),
           QSQ_FIELD("clip_eps", c.ppo.clip_eps),
           QSQ_FIELD("value_weight", c.ppo.value_weight),
           QSQ_FIELD("entropy_weight", c.ppo.entropy_weight),
           QSQ_FIELD("minibatch", c.ppo.minibatch),
           QSQ_FIELD("epochs", c.ppo.epochs),
           QSQ_FIELD("max_env_steps", c.ppo.max_env_steps),
           QSQ_FIELD("buffer_size", c.ppo.buffer_size),
           QSQ_FIELD("hidden", c.ppo.hidden),
           QSQ_FIELD("normalize_advantages", c.ppo.normalize_advantages),
           QSQ_FIELD("hidden_gain", c.ppo.hidden_gain),
           QSQ_FIELD("actor_output_gain", c.ppo.actor_output_gain),
           QSQ_FIELD("critic_output_gain", c.ppo.critic_output_gain),
       }},
      {"de",
       {
           QSQ_FIELD("population", c.de.de.population),
           QSQ_FIELD("mutation", c.de.de.mutation),
           QSQ_FIELD("crossover", c.de.de.crossover),
           QSQ_FIELD("generations", c.de.de.generations),
           QSQ_FIELD("seed", c.de.de.seed),
           QSQ_FIELD("n_e", c.de.n_e),
       }},
      {"metrology",
       {
           QSQ_FIELD("gamma_rad_per_s_per_tesla", c.metrology.field.gamma),
           QSQ_FIELD("b0_tesla", c.metrology.field.b0),
           QSQ_FIELD("chi_rad_per_s", c.metrology.field.chi),
           QSQ_FIELD("chi_t_max", c.metrology.chi_t_max),
           QSQ_FIELD("rx_dd_max_n_e", c.metrology.rx_dd_max_n_e),
           QSQ_FIELD("t_tot_min_s", c.metrology.t_tot_min_s),
           QSQ_FIELD("t_tot_max_s", c.metrology.t_tot_max_s),
           QSQ_FIELD("t_tot_points", c.metrology.t_tot_points),
           QSQ_FIELD("rl_probe", c.metrology.rl_probe),
       }},
      {"hyperfine",
       {
           QSQ_FIELD("i", c.hyperfine.atom.i),
           QSQ_FIELD("j", c.hyperfine.atom.j),
           QSQ_FIELD("a_hz", c.hyperfine.atom.a_hz),
           QSQ_FIELD("b_hz", c.hyperfine.atom.b_hz),
           QSQ_FIELD("g_j", c.hyperfine.atom.g_j),
           QSQ_FIELD("g_i", c.hyperfine.atom.g_i),
           QSQ_FIELD("mu_b_joule_per_tesla", c.hyperfine.atom.mu_b),
           QSQ_FIELD("mu_n_joule_per_tesla", c.hyperfine.atom.mu_n),
           QSQ_FIELD("quadrupole_form", c.hyperfine.atom.quadrupole),
           QSQ_FIELD("b_field_tesla", c.hyperfine.b_field_tesla),
           QSQ_FIELD("sweep_min_tesla", c.hyperfine.sweep_min_tesla),
           QSQ_FIELD("sweep_max_tesla", c.hyperfine.sweep_max_tesla),
           QSQ_FIELD("sweep_points", c.hyperfine.sweep_points),
       }},
      {"evaluate",
       {
           QSQ_FIELD("wigner_steps", c.evaluate.wigner_steps),
           QSQ_FIELD("wigner_theta_points", c.evaluate.wigner_theta_points),
           QSQ_FIELD("wigner_phi_points", c.evaluate.wigner_phi_points),
       }},
      {"output", {QSQ_FIELD("dir", c.output_dir)}},
  };
  return s;
}

#undef QSQ_FIELD

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig config;
  const Schema& s = schema();
  for (const auto& [section_name, section] : tree) {
    if (!section.data().empty()) {
      throw Error(ErrorCode::kConfig, "key '" + section_name + "' outside any section");
    }
    auto it = std::find_if(s.begin(), s.end(),
                           [&](const auto& entry) { return entry.first == section_name; });
    if (it == s.end()) throw Error(ErrorCode::kConfig, "unknown section [" + section_name + "]");
    for (const auto& [key, value] : section) {
      const auto& bindings = it->second;
      auto b = std::find_if(bindings.begin(), bindings.end(),
                            [&](const Binding& x) { return x.key == key; });
      if (b == bindings.end()) {
        throw Error(ErrorCode::kConfig, "unknown key '" + section_name + "." + key + "'");
      }
      b->set(config, value.data());
    }
  }
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& [section_name, bindings] : schema()) {
    out += "[" + section_name + "]\n";
    for (const auto& b : bindings) {
      if (auto v = b.get(config)) out += b.key + " = " + *v + "\n";
    }
    out += "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(serialize_config(config)); }

void validate(const RunConfig& c) {
  validate(c.env);
  validate(c.ppo, c.env);
  validate(c.de.de);
  validate(c.hyperfine.atom);
  if (c.de.n_e < 1) throw Error(ErrorCode::kConfig, "de.n_e must be >= 1");
  const auto& m = c.metrology;
  if (!(m.field.gamma > 0 && m.field.b0 > 0 && m.field.chi > 0)) {
    throw Error(ErrorCode::kConfig, "metrology gamma, b0 and chi must be positive");
  }
  if (!(m.chi_t_max > 0) || m.rx_dd_max_n_e < 1 || !(m.t_tot_min_s > 0) ||
      !(m.t_tot_max_s >= m.t_tot_min_s) || m.t_tot_points < 1) {
    throw Error(ErrorCode::kConfig, "metrology sweep ranges are invalid");
  }
  if (m.rl_probe != "policy" && m.rl_probe != "scripted") {
    throw Error(ErrorCode::kConfig, "metrology.rl_probe must be 'policy' or 'scripted'");
  }
  const auto& h = c.hyperfine;
  if (!(h.b_field_tesla >= 0) || !(h.sweep_min_tesla > 0) ||
      !(h.sweep_max_tesla > h.sweep_min_tesla) || h.sweep_points < 2) {
    throw Error(ErrorCode::kConfig, "hyperfine field range is invalid");
  }
  if (c.evaluate.wigner_theta_points < 2 || c.evaluate.wigner_phi_points < 2) {
    throw Error(ErrorCode::kConfig, "evaluate Wigner grid needs >= 2 points per axis");
  }
  for (int k : c.evaluate.wigner_steps) {
    if (k < 0 || k >= c.env.n_steps) {
      throw Error(ErrorCode::kConfig, "evaluate.wigner_steps entry " + std::to_string(k) +
                                          " outside 0.." + std::to_string(c.env.n_steps - 1));
    }
  }
  if (c.output_dir.empty()) throw Error(ErrorCode::kConfig, "output.dir must not be empty");
}

}  // namespace qsq
