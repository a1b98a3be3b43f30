#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdtc/lattice.hpp"
#include "pdtc/propagator.hpp"

namespace pdtc {

/// Invalid configuration; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Protocol { two_tone, single_tone, three_tone, spin_lock };

const char* to_string(Protocol p);

/// Run description. Times are in units of 1/J (J = median |J_kl|), fields and
/// couplings in units of J. Angle keys also accept a `_pi` suffix, e.g.
/// `gamma_y_pi: 0.98`; `B_ac_pi: x` reads as B_AC = x J / pi.
struct RunConfig {
  std::string name = "run";
  std::string experiment = "run";  // run | sweep | dome | noise
  std::string scale = "desk";      // desk | full

  Protocol protocol = Protocol::two_tone;
  int n_spins = 10;
  int n_samples = 10;
  std::uint64_t seed = 1;  // graph j uses seed + j
  double r_min = 0.9;
  double r_max = 1.1;
  int draw_budget = kDefaultDrawBudget;  // rejection draws per placed spin

  int n_pulses = 16;
  int n_pulses2 = 8;  // second block of the three-tone drive
  double tau = 0.025;
  double tau_x = 0.0375;
  double tau_y = 0.075;
  double theta_x;
  double gamma_y;
  int cycles = 40;

  double b_ac;
  std::optional<double> f_ac;  // absent: realized resonance plus `detuning`
  double detuning = 0.0;
  double phase_ac;

  double sigma = 0.0;
  std::uint64_t disorder_seed = 1000;  // sample j uses disorder_seed + j
  bool baseline = true;                // also run every point with B_AC = 0

  std::string sweep_parameter;  // phase | amplitude | detuning | gamma | sigma
  std::vector<double> sweep_values;

  Engine engine = Engine::matrix_free;
  int substeps = 1;

  std::set<std::string> explicit_keys;

  RunConfig();
  Axis initial_axis() const;
  Axis component() const;
};

/// Parses the YAML key/value text. Unknown keys and malformed values raise
/// ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks ranges; throws ConfigError naming the first bad key.
void validate(const RunConfig& cfg);

/// "desk" keeps the config; "full" raises keys not given explicitly to
/// production scale (15 spins, 50 samples).
void apply_scale(RunConfig& cfg, const std::string& scale);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace pdtc
