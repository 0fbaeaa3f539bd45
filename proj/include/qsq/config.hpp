#ifndef QSQ_CONFIG_HPP_
#define QSQ_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "qsq/de.hpp"
#include "qsq/env.hpp"
#include "qsq/hyperfine.hpp"
#include "qsq/metrology.hpp"
#include "qsq/ppo.hpp"

namespace qsq {

struct DeRunConfig {
  DeConfig de;
  int n_e = 11;  // encoding horizon for the standalone optimization

  friend bool operator==(const DeRunConfig&, const DeRunConfig&) = default;
};

struct MetrologyConfig {
  FieldParams field;
  double chi_t_max = 0.3;      // phase sweep range
  int rx_dd_max_n_e = 34;      // DE per horizon gets expensive beyond this
  double t_tot_min_s = 3.5e-3;
  double t_tot_max_s = 30e-3;
  int t_tot_points = 56;
  std::string rl_probe = "policy";  // policy | scripted

  friend bool operator==(const MetrologyConfig&, const MetrologyConfig&) = default;
};

struct HyperfineConfig {
  AtomParams atom;
  double b_field_tesla = 50e-6;
  double sweep_min_tesla = 10e-6;
  double sweep_max_tesla = 100e-6;
  int sweep_points = 10;

  friend bool operator==(const HyperfineConfig&, const HyperfineConfig&) = default;
};

struct EvaluateConfig {
  std::vector<int> wigner_steps = {0, 35, 69};
  int wigner_theta_points = 48;
  int wigner_phi_points = 96;

  friend bool operator==(const EvaluateConfig&, const EvaluateConfig&) = default;
};

// Flat INI sections: [run] [environment] [ppo] [de] [metrology] [hyperfine]
// [evaluate] [output]. Physical keys carry their unit in the name.
struct RunConfig {
  std::uint64_t seed = 1;
  EnvConfig env;
  PpoConfig ppo;
  DeRunConfig de;
  MetrologyConfig metrology;
  HyperfineConfig hyperfine;
  EvaluateConfig evaluate;
  std::string output_dir = "results";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws kConfig naming the line or key on malformed input or unknown keys.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// SHA-256 of the canonical serialization.
std::string config_hash(const RunConfig& config);

void validate(const RunConfig& config);

}  // namespace qsq

#endif  // QSQ_CONFIG_HPP_
