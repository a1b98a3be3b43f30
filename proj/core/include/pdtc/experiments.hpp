#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdtc/analysis.hpp"
#include "pdtc/config.hpp"
#include "pdtc/lattice.hpp"

namespace pdtc {

/// Runs fn(0..n-1) on up to `workers` threads. Results must be written by
/// index; the first exception is rethrown after all tasks finish.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

/// Sampled, oriented and median-normalized graph j of the ensemble.
SpinGraph ensemble_graph(const RunConfig& cfg, int j);

PulseSchedule make_schedule(const RunConfig& cfg);
/// Drive from the config; frequency defaults to the realized resonance of
/// the first block plus the detuning.
AcDrive make_drive(const RunConfig& cfg, const PulseSchedule& schedule);

struct SampleRecord {
  int index = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t disorder_seed = 0;
  bool ok = false;
  std::string error;
  double fidelity = 0.0;
  LifetimeFit lifetime;
  double j_spinlock = 0.0;
  std::string schedule_hash;
};

struct PointResult {
  std::string parameter;
  double value = 0.0;
  bool ac = true;  // false for the B_AC = 0 baseline
  AcDrive drive;
  PulseSchedule schedule;
  double sigma = 0.0;
  std::vector<SampleRecord> samples;
  std::vector<TimeTrace> traces;  // by sample index; empty when the sample failed
  int n_ok = 0;
  int n_failed = 0;
  double mean_f = 0.0;
  std::optional<double> std_f;  // absent for fewer than two successful samples
  TimeTrace mean_trace;
  LifetimeFit lifetime;  // of the ensemble-mean trace
  PrethermalPrediction oracle;

  bool failed() const { return n_ok == 0; }
  double standard_error() const;
};

struct SweepResult {
  std::string parameter;
  std::vector<PointResult> points;     // AC on
  std::vector<PointResult> baselines;  // B_AC = 0, one per point when it depends on the value
};

/// One ensemble point for the config as given.
PointResult run_point(const RunConfig& cfg, int workers, bool keep_traces = true);

/// The configured point with AC, plus a B_AC = 0 baseline when enabled.
SweepResult run_ensemble(const RunConfig& cfg, int workers);

SweepResult sweep_phase(const RunConfig& cfg, const std::vector<double>& phases, int workers);
SweepResult sweep_amplitude(const RunConfig& cfg, const std::vector<double>& amplitudes,
                            int workers);
/// Values are detunings from the realized resonance.
SweepResult sweep_frequency(const RunConfig& cfg, const std::vector<double>& detunings,
                            int workers);
SweepResult sweep_gamma(const RunConfig& cfg, const std::vector<double>& gammas, int workers);
/// AC and baseline point per disorder strength.
SweepResult sweep_disorder(const RunConfig& cfg, const std::vector<double>& sigmas, int workers);

struct DomeResult {
  std::vector<double> gammas;
  int cycles = 0;
  // rows: gamma, columns: kick index 1..cycles; ensemble-mean signed <I^x>
  Eigen::MatrixXd with_ac;
  Eigen::MatrixXd without_ac;
  int n_failed = 0;
};

DomeResult map_dome(const RunConfig& cfg, const std::vector<double>& gammas, int workers);

struct RunOutcome {
  int exit_code = 0;  // 0 success, 2 partial failure
  std::vector<std::string> failures;
};

/// Executes the configured experiment and writes manifest.json, summary.csv,
/// traces/ and graphs/ under `out_dir`.
RunOutcome run_config(const RunConfig& cfg, const std::filesystem::path& out_dir, int workers);

/// Re-reads a run directory, recomputes F and T2' from the stored mean
/// traces and prints a table. Returns false when the directory is incomplete.
bool report_run(const std::filesystem::path& run_dir, std::ostream& out);

}  // namespace pdtc
