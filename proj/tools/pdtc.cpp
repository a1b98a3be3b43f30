// pdtc: run prethermal time-crystal ensembles from a YAML config.
//
//   pdtc run    --config proof.yaml --out runs/proof --workers 4
//   pdtc sweep  --config phase.yaml --out runs/phase --scale full
//   pdtc report --out runs/phase
//
// Exit codes: 0 success, 1 configuration error, 2 partial failure.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <thread>

#include "pdtc/config.hpp"
#include "pdtc/experiments.hpp"

namespace {

int execute(const std::string& experiment, const std::string& config_path, const std::string& out,
            int workers, const std::string& scale) {
  pdtc::RunConfig cfg;
  try {
    cfg = pdtc::load_config(config_path);
    cfg.experiment = experiment;
    pdtc::apply_scale(cfg, scale);
  } catch (const pdtc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  try {
    const auto outcome = pdtc::run_config(cfg, out, workers);
    pdtc::report_run(out, std::cout);
    if (outcome.exit_code != 0) {
      std::cerr << outcome.failures.size() << " failure(s):\n";
      for (const auto& f : outcome.failures) std::cerr << "  " << f << '\n';
    }
    return outcome.exit_code;
  } catch (const pdtc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prethermal discrete time crystal simulator"};
  app.require_subcommand(1);

  std::string config_path, out = "pdtc_out", scale = "desk";
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  for (const char* name : {"run", "sweep", "dome", "noise"}) {
    auto* sub = app.add_subcommand(name, std::string("execute a ") + name + " experiment");
    sub->add_option("-c,--config", config_path, "YAML config")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out, "output directory");
    sub->add_option("-w,--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("-s,--scale", scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
  }
  auto* report = app.add_subcommand("report", "summarize an existing run directory");
  report->add_option("-o,--out,dir", out, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (report->parsed()) return pdtc::report_run(out, std::cout) ? 0 : 2;
  const std::string experiment = app.get_subcommands().front()->get_name();
  return execute(experiment, config_path, out, workers, scale);
}
