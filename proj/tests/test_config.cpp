#include <gtest/gtest.h>

#include <numbers>

#include "pdtc/config.hpp"

using namespace pdtc;

namespace {

std::string error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST(Config, EmptyGivesSimulationDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.protocol, Protocol::two_tone);
  EXPECT_EQ(c.n_spins, 10);
  EXPECT_EQ(c.n_samples, 10);
  EXPECT_EQ(c.n_pulses, 16);
  EXPECT_DOUBLE_EQ(c.tau, 0.025);
  EXPECT_DOUBLE_EQ(c.tau_x, 1.5 * c.tau);
  EXPECT_DOUBLE_EQ(c.tau_y, 3 * c.tau);
  EXPECT_DOUBLE_EQ(c.gamma_y, 0.98 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(c.b_ac, 1 / std::numbers::pi);
  EXPECT_DOUBLE_EQ(c.phase_ac, std::numbers::pi / 2);
  EXPECT_FALSE(c.f_ac.has_value());
}

TEST(Config, ParsesKeysAndPiSuffix) {
  const auto c = parse_config(R"(
name: phase
experiment: sweep
protocol: single_tone
n_spins: 8
seed: 12
tau: 0.3
tau_y: 0.0
gamma_y_pi: 0.97
B_ac_pi: 1.0
phase_ac_pi: 0.25
engine: dense
sweep:
  parameter: phase
  values_pi: [0, 0.5, 1]
)");
  EXPECT_EQ(c.name, "phase");
  EXPECT_EQ(c.protocol, Protocol::single_tone);
  EXPECT_EQ(c.seed, 12u);
  EXPECT_DOUBLE_EQ(c.gamma_y, 0.97 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(c.b_ac, 1.0 / std::numbers::pi);
  EXPECT_DOUBLE_EQ(c.phase_ac, std::numbers::pi / 4);
  EXPECT_EQ(c.engine, Engine::dense);
  ASSERT_EQ(c.sweep_values.size(), 3u);
  EXPECT_DOUBLE_EQ(c.sweep_values[2], std::numbers::pi);
  EXPECT_EQ(c.initial_axis(), Axis::z);
  EXPECT_TRUE(c.explicit_keys.count("gamma_y"));
}

TEST(Config, NegativeTauNamesTau) {
  EXPECT_EQ(error_key("tau: -0.1\n"), "tau");
  try {
    parse_config("tau: -0.1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("tau"), std::string::npos);
  }
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(error_key("bogus: 1\n"), "bogus");
  EXPECT_EQ(error_key("n_spins: ten\n"), "n_spins");
  EXPECT_EQ(error_key("protocol: four_tone\n"), "protocol");
  EXPECT_EQ(error_key("sigma: -1\n"), "sigma");
  EXPECT_EQ(error_key("experiment: sweep\nsweep: {parameter: colour, values: [1]}\n"),
            "sweep.parameter");
  EXPECT_EQ(error_key("experiment: dome\n"), "sweep.values");
  EXPECT_EQ(error_key("protocol: three_tone\nN: 4\nN2: 4\n"), "N2");
  EXPECT_EQ(error_key("protocol: single_tone\ntau: 0.1\ntau_y: 0.2\n"), "tau_y");
  EXPECT_EQ(error_key("engine: dense\nn_spins: 14\n"), "engine");
  EXPECT_EQ(error_key("sweep: {parameter: phase, vals: [1]}\n"), "sweep.vals");
  EXPECT_EQ(error_key("[1, 2]\n"), "<file>");
  EXPECT_EQ(error_key("a: [\n"), "<file>");
}

TEST(Config, FullScaleRespectsExplicitKeys) {
  auto c = parse_config("n_samples: 4\n");
  apply_scale(c, "full");
  EXPECT_EQ(c.n_spins, 15);
  EXPECT_EQ(c.n_samples, 4);
  auto d = parse_config("");
  apply_scale(d, "desk");
  EXPECT_EQ(d.n_spins, 10);
  EXPECT_THROW(apply_scale(d, "huge"), ConfigError);
}

TEST(Config, JsonRecordsEveryParameter) {
  const auto c = parse_config("f_ac: 0.45\nsigma: 2\n");
  const auto j = to_json(c);
  EXPECT_EQ(j.at("f_ac"), 0.45);
  EXPECT_EQ(j.at("sigma"), 2.0);
  EXPECT_EQ(j.at("protocol"), "two_tone");
  EXPECT_TRUE(to_json(parse_config("")).at("f_ac").is_null());
}

TEST(ConfigFiles, ShippedExamplesValidate) {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(PDTC_CONFIG_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    ++n;
    RunConfig c;
    EXPECT_NO_THROW(c = load_config(e.path())) << e.path();
    EXPECT_NO_THROW(apply_scale(c, "full")) << e.path();
  }
  EXPECT_GE(n, 9);
  const auto p = load_config(std::filesystem::path(PDTC_CONFIG_DIR) / "proof_of_principle.yaml");
  const RunConfig d;
  EXPECT_DOUBLE_EQ(p.b_ac, d.b_ac);
  EXPECT_DOUBLE_EQ(p.gamma_y, d.gamma_y);
  EXPECT_EQ(p.cycles, 40);
}
