#include "pdtc/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace pdtc {

namespace {

constexpr double kPi = std::numbers::pi;

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError(key, "expected a scalar value");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "cannot parse '" + n.Scalar() + "'");
  }
}

std::vector<double> number_list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError(key, "expected a list of numbers");
  std::vector<double> v;
  for (const auto& e : n) v.push_back(scalar<double>(e, key));
  return v;
}

Protocol protocol_from(const std::string& s, const std::string& key) {
  if (s == "two_tone") return Protocol::two_tone;
  if (s == "single_tone") return Protocol::single_tone;
  if (s == "three_tone") return Protocol::three_tone;
  if (s == "spin_lock") return Protocol::spin_lock;
  throw ConfigError(key, "unknown protocol '" + s + "'");
}

Engine engine_from(const std::string& s, const std::string& key) {
  if (s == "matrix_free") return Engine::matrix_free;
  if (s == "dense") return Engine::dense;
  throw ConfigError(key, "unknown engine '" + s + "'");
}

}  // namespace

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::two_tone: return "two_tone";
    case Protocol::single_tone: return "single_tone";
    case Protocol::three_tone: return "three_tone";
    case Protocol::spin_lock: return "spin_lock";
  }
  return "?";
}

RunConfig::RunConfig()
    : theta_x(kPi / 2), gamma_y(0.98 * kPi), b_ac(1.0 / kPi), phase_ac(kPi / 2) {}

Axis RunConfig::initial_axis() const {
  return protocol == Protocol::single_tone ? Axis::z : Axis::x;
}

Axis RunConfig::component() const { return initial_axis(); }

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<file>", std::string("malformed YAML: ") + e.what());
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("<file>", "top level must be a key/value map");

  using Setter = std::function<void(const YAML::Node&, const std::string&)>;
  auto real = [](double& dst) {
    return Setter([&dst](const YAML::Node& n, const std::string& k) { dst = scalar<double>(n, k); });
  };
  auto angle = [](double& dst) {
    return Setter([&dst](const YAML::Node& n, const std::string& k) {
      dst = scalar<double>(n, k) * (k.ends_with("_pi") ? kPi : 1.0);
    });
  };
  auto integer = [](int& dst) {
    return Setter([&dst](const YAML::Node& n, const std::string& k) { dst = scalar<int>(n, k); });
  };
  auto seed = [](std::uint64_t& dst) {
    return Setter([&dst](const YAML::Node& n, const std::string& k) {
      const long long v = scalar<long long>(n, k);
      if (v < 0) throw ConfigError(k, "must be >= 0");
      dst = static_cast<std::uint64_t>(v);
    });
  };
  auto text_value = [](std::string& dst) {
    return Setter([&dst](const YAML::Node& n, const std::string& k) { dst = scalar<std::string>(n, k); });
  };

  std::map<std::string, Setter> setters = {
      {"name", text_value(cfg.name)},
      {"experiment", text_value(cfg.experiment)},
      {"scale", text_value(cfg.scale)},
      {"protocol", [&](const YAML::Node& n, const std::string& k) {
         cfg.protocol = protocol_from(scalar<std::string>(n, k), k);
       }},
      {"n_spins", integer(cfg.n_spins)},
      {"n_samples", integer(cfg.n_samples)},
      {"seed", seed(cfg.seed)},
      {"r_min", real(cfg.r_min)},
      {"r_max", real(cfg.r_max)},
      {"draw_budget", integer(cfg.draw_budget)},
      {"N", integer(cfg.n_pulses)},
      {"N2", integer(cfg.n_pulses2)},
      {"tau", real(cfg.tau)},
      {"tau_x", real(cfg.tau_x)},
      {"tau_y", real(cfg.tau_y)},
      {"theta_x", angle(cfg.theta_x)},
      {"theta_x_pi", angle(cfg.theta_x)},
      {"gamma_y", angle(cfg.gamma_y)},
      {"gamma_y_pi", angle(cfg.gamma_y)},
      {"cycles", integer(cfg.cycles)},
      {"B_ac", real(cfg.b_ac)},
      {"B_ac_pi", [&](const YAML::Node& n, const std::string& k) { cfg.b_ac = scalar<double>(n, k) / kPi; }},
      {"f_ac", [&](const YAML::Node& n, const std::string& k) { cfg.f_ac = scalar<double>(n, k); }},
      {"detuning", real(cfg.detuning)},
      {"phase_ac", angle(cfg.phase_ac)},
      {"phase_ac_pi", angle(cfg.phase_ac)},
      {"sigma", real(cfg.sigma)},
      {"disorder_seed", seed(cfg.disorder_seed)},
      {"baseline", [&](const YAML::Node& n, const std::string& k) { cfg.baseline = scalar<bool>(n, k); }},
      {"engine", [&](const YAML::Node& n, const std::string& k) {
         cfg.engine = engine_from(scalar<std::string>(n, k), k);
       }},
      {"substeps", integer(cfg.substeps)},
      {"sweep", [&](const YAML::Node& n, const std::string& k) {
         if (!n.IsMap()) throw ConfigError(k, "expected a map with 'parameter' and 'values'");
         for (const auto& e : n) {
           const std::string sub = e.first.as<std::string>();
           const std::string full = k + "." + sub;
           if (sub == "parameter") {
             cfg.sweep_parameter = scalar<std::string>(e.second, full);
           } else if (sub == "values") {
             cfg.sweep_values = number_list(e.second, full);
           } else if (sub == "values_pi") {
             cfg.sweep_values = number_list(e.second, full);
             for (auto& v : cfg.sweep_values) v *= kPi;
           } else {
             throw ConfigError(full, "unknown key");
           }
         }
       }},
  };

  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, "unknown key");
    it->second(entry.second, key);
    std::string canonical = key;
    if (canonical.ends_with("_pi")) canonical.resize(canonical.size() - 3);
    cfg.explicit_keys.insert(canonical);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive");
  };
  auto non_negative = [](double v, const char* key) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be >= 0");
  };
  const std::set<std::string> experiments = {"run", "sweep", "dome", "noise"};
  if (!experiments.count(cfg.experiment)) {
    throw ConfigError("experiment", "must be one of run, sweep, dome, noise");
  }
  if (cfg.scale != "desk" && cfg.scale != "full") throw ConfigError("scale", "must be desk or full");
  if (cfg.n_spins < 2 || cfg.n_spins > kMaxSpins) throw ConfigError("n_spins", "out of range");
  if (cfg.n_samples < 1) throw ConfigError("n_samples", "must be >= 1");
  positive(cfg.r_min, "r_min");
  positive(cfg.r_max, "r_max");
  if (cfg.r_min >= cfg.r_max) throw ConfigError("r_min", "must be smaller than r_max");
  if (cfg.draw_budget < 1) throw ConfigError("draw_budget", "must be >= 1");
  if (cfg.n_pulses < 0) throw ConfigError("N", "must be >= 0");
  if (cfg.n_pulses2 < 0) throw ConfigError("N2", "must be >= 0");
  positive(cfg.tau, "tau");
  if (cfg.protocol == Protocol::single_tone) {
    non_negative(cfg.tau_y, "tau_y");
    if (cfg.tau_y >= cfg.tau) throw ConfigError("tau_y", "must be smaller than tau for single-tone");
  } else {
    positive(cfg.tau_x, "tau_x");
    if (cfg.protocol != Protocol::spin_lock) positive(cfg.tau_y, "tau_y");
  }
  if (cfg.protocol == Protocol::three_tone && cfg.n_pulses == cfg.n_pulses2) {
    throw ConfigError("N2", "three-tone blocks must differ");
  }
  if (cfg.cycles < 0) throw ConfigError("cycles", "must be >= 0");
  non_negative(cfg.b_ac, "B_ac");
  if (cfg.f_ac) non_negative(*cfg.f_ac, "f_ac");
  non_negative(cfg.sigma, "sigma");
  if (cfg.substeps < 1) throw ConfigError("substeps", "must be >= 1");
  if (cfg.engine == Engine::dense && cfg.n_spins > dense::kMaxDenseSpins) {
    throw ConfigError("engine", "dense engine supports at most 12 spins");
  }
  if (cfg.experiment == "sweep") {
    const std::set<std::string> params = {"phase", "amplitude", "detuning", "gamma", "sigma"};
    if (!params.count(cfg.sweep_parameter)) {
      throw ConfigError("sweep.parameter", "must be one of phase, amplitude, detuning, gamma, sigma");
    }
  }
  if (cfg.experiment != "run" && cfg.sweep_values.empty()) {
    throw ConfigError("sweep.values", "grid must not be empty");
  }
}

void apply_scale(RunConfig& cfg, const std::string& scale) {
  if (scale != "desk" && scale != "full") throw ConfigError("scale", "must be desk or full");
  cfg.scale = scale;
  if (scale == "full") {
    if (!cfg.explicit_keys.count("n_spins")) cfg.n_spins = 15;
    if (!cfg.explicit_keys.count("n_samples")) cfg.n_samples = 50;
  }
  validate(cfg);
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = {{"name", cfg.name},
                      {"experiment", cfg.experiment},
                      {"scale", cfg.scale},
                      {"protocol", to_string(cfg.protocol)},
                      {"n_spins", cfg.n_spins},
                      {"n_samples", cfg.n_samples},
                      {"seed", cfg.seed},
                      {"r_min", cfg.r_min},
                      {"r_max", cfg.r_max},
                      {"draw_budget", cfg.draw_budget},
                      {"N", cfg.n_pulses},
                      {"N2", cfg.n_pulses2},
                      {"tau", cfg.tau},
                      {"tau_x", cfg.tau_x},
                      {"tau_y", cfg.tau_y},
                      {"theta_x", cfg.theta_x},
                      {"gamma_y", cfg.gamma_y},
                      {"cycles", cfg.cycles},
                      {"B_ac", cfg.b_ac},
                      {"detuning", cfg.detuning},
                      {"phase_ac", cfg.phase_ac},
                      {"sigma", cfg.sigma},
                      {"disorder_seed", cfg.disorder_seed},
                      {"baseline", cfg.baseline},
                      {"engine", cfg.engine == Engine::dense ? "dense" : "matrix_free"},
                      {"substeps", cfg.substeps}};
  j["f_ac"] = cfg.f_ac ? nlohmann::json(*cfg.f_ac) : nlohmann::json(nullptr);
  if (!cfg.sweep_values.empty()) {
    j["sweep"] = {{"parameter", cfg.sweep_parameter}, {"values", cfg.sweep_values}};
  }
  return j;
}

}  // namespace pdtc
