#include "pdtc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "pdtc/operators.hpp"
#include "pdtc/trace_io.hpp"

namespace pdtc {

namespace fs = std::filesystem;

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  workers = std::clamp(workers, 1, n);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

SpinGraph ensemble_graph(const RunConfig& cfg, int j) {
  const SpinGraph g = sample_graph(cfg.n_spins, cfg.r_min, cfg.r_max, cfg.seed + j, cfg.draw_budget);
  return normalize_median(orient_graph(g));
}

PulseSchedule make_schedule(const RunConfig& cfg) {
  switch (cfg.protocol) {
    case Protocol::two_tone:
      return build_two_tone(cfg.n_pulses, cfg.tau, cfg.tau_x, cfg.tau_y, cfg.theta_x, cfg.gamma_y,
                            cfg.cycles);
    case Protocol::single_tone:
      return build_single_tone(cfg.tau, cfg.tau_y, cfg.gamma_y, cfg.cycles);
    case Protocol::three_tone:
      return build_three_tone(cfg.n_pulses, cfg.n_pulses2, cfg.tau, cfg.tau_x, cfg.tau_y,
                              cfg.theta_x, cfg.gamma_y, cfg.cycles);
    case Protocol::spin_lock:
      return build_spin_lock(cfg.tau, cfg.tau_x, cfg.theta_x, cfg.cycles);
  }
  throw std::logic_error("unknown protocol");
}

AcDrive make_drive(const RunConfig& cfg, const PulseSchedule& schedule) {
  AcDrive d;
  d.amplitude = cfg.b_ac;
  d.phase = cfg.phase_ac;
  if (cfg.f_ac) {
    d.frequency = *cfg.f_ac;
  } else {
    const auto f = schedule.resonance_frequencies();
    d.frequency = (f.empty() ? 0.0 : f.front()) + cfg.detuning;
  }
  return d;
}

double PointResult::standard_error() const {
  return std_f ? *std_f / std::sqrt(static_cast<double>(n_ok)) : 0.0;
}

namespace {

struct PointJob {
  RunConfig cfg;
  std::string parameter;
  double value = 0.0;
};

void simulate_sample(const RunConfig& cfg, const PulseSchedule& schedule, const AcDrive& drive,
                     int j, SampleRecord& rec, TimeTrace& trace) {
  rec.index = j;
  rec.graph_seed = cfg.seed + j;
  rec.disorder_seed = cfg.disorder_seed + j;
  try {
    const SpinGraph graph = ensemble_graph(cfg, j);
    const DisorderRealization disorder = sample_disorder(cfg.sigma, cfg.n_spins, rec.disorder_seed);
    const OperatorSet ops(cfg.n_spins);
    const DipolarHamiltonian hdd =
        cfg.sigma > 0.0 ? build_hdd(graph, ops, std::span<const double>(disorder.zeta))
                        : build_hdd(graph, ops);
    rec.j_spinlock = build_hsl(graph, ops).j_spinlock;
    rec.schedule_hash = schedule_hash(schedule, drive, disorder);
    PropagatorOptions opt;
    opt.engine = cfg.engine;
    opt.substeps = cfg.substeps;
    trace = simulate(hdd, ops, schedule, drive, disorder, cfg.initial_axis(), opt);
    rec.fidelity = fidelity(trace, cfg.component()).value;
    rec.lifetime = lifetime_1e(trace, cfg.component(), schedule.super_period);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    trace = TimeTrace{};
  }
}

void aggregate(PointResult& p, const RunConfig& cfg, bool keep_traces) {
  std::vector<double> f, jsl;
  std::vector<TimeTrace> ok_traces;
  for (std::size_t j = 0; j < p.samples.size(); ++j) {
    const auto& s = p.samples[j];
    if (!s.ok) {
      ++p.n_failed;
      continue;
    }
    ++p.n_ok;
    f.push_back(s.fidelity);
    jsl.push_back(s.j_spinlock);
    ok_traces.push_back(p.traces[j]);
  }
  p.mean_f = mean(f);
  p.std_f = sample_std(f);
  if (!ok_traces.empty()) {
    p.mean_trace = average_traces(ok_traces);
    p.lifetime = lifetime_1e(p.mean_trace, cfg.component(), p.schedule.super_period);
  }
  if (!jsl.empty() && cfg.gamma_y > 0.0 && cfg.protocol != Protocol::spin_lock) {
    p.oracle = prethermal_oracle(effective_field(p.drive, cfg.tau_y, cfg.gamma_y), mean(jsl));
  }
  if (!keep_traces) p.traces.clear();
}

std::vector<PointResult> run_points(const std::vector<PointJob>& jobs, int workers,
                                    bool keep_traces) {
  std::vector<PointResult> points(jobs.size());
  std::vector<std::pair<int, int>> tasks;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& cfg = jobs[i].cfg;
    validate(cfg);
    auto& p = points[i];
    p.parameter = jobs[i].parameter;
    p.value = jobs[i].value;
    p.ac = cfg.b_ac != 0.0;
    p.schedule = make_schedule(cfg);
    p.drive = make_drive(cfg, p.schedule);
    p.sigma = cfg.sigma;
    p.samples.resize(cfg.n_samples);
    p.traces.resize(cfg.n_samples);
    for (int j = 0; j < cfg.n_samples; ++j) tasks.emplace_back(static_cast<int>(i), j);
  }
  // one task per (point, sample); results land by index so completion order is irrelevant
  parallel_for(static_cast<int>(tasks.size()), workers, [&](int t) {
    const auto [i, j] = tasks[t];
    auto& p = points[i];
    simulate_sample(jobs[i].cfg, p.schedule, p.drive, j, p.samples[j], p.traces[j]);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) aggregate(points[i], jobs[i].cfg, keep_traces);
  return points;
}

RunConfig without_ac(RunConfig cfg) {
  cfg.b_ac = 0.0;
  return cfg;
}

SweepResult shared_baseline_sweep(const RunConfig& cfg, const std::string& parameter,
                                  const std::vector<double>& values, int workers,
                                  const std::function<void(RunConfig&, double)>& set) {
  if (values.empty()) throw std::invalid_argument("sweep grid must not be empty");
  std::vector<PointJob> jobs;
  for (double v : values) {
    PointJob job{cfg, parameter, v};
    set(job.cfg, v);
    jobs.push_back(job);
  }
  const std::size_t n = jobs.size();
  if (cfg.baseline) jobs.push_back({without_ac(cfg), parameter, 0.0});
  auto points = run_points(jobs, workers, true);
  SweepResult r;
  r.parameter = parameter;
  r.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(n));
  if (cfg.baseline) r.baselines.push_back(points.back());
  return r;
}

SweepResult paired_sweep(const RunConfig& cfg, const std::string& parameter,
                         const std::vector<double>& values, int workers,
                         const std::function<void(RunConfig&, double)>& set) {
  if (values.empty()) throw std::invalid_argument("sweep grid must not be empty");
  std::vector<PointJob> jobs;
  for (double v : values) {
    PointJob job{cfg, parameter, v};
    set(job.cfg, v);
    jobs.push_back(job);
    if (cfg.baseline) jobs.push_back({without_ac(job.cfg), parameter, v});
  }
  auto points = run_points(jobs, workers, true);
  SweepResult r;
  r.parameter = parameter;
  for (auto& p : points) (p.ac || !cfg.baseline ? r.points : r.baselines).push_back(std::move(p));
  return r;
}

}  // namespace

PointResult run_point(const RunConfig& cfg, int workers, bool keep_traces) {
  return run_points({{cfg, "", 0.0}}, workers, keep_traces).front();
}

SweepResult run_ensemble(const RunConfig& cfg, int workers) {
  std::vector<PointJob> jobs{{cfg, "", 0.0}};
  if (cfg.baseline && cfg.b_ac != 0.0) jobs.push_back({without_ac(cfg), "", 0.0});
  auto points = run_points(jobs, workers, true);
  SweepResult r;
  r.points.push_back(points.front());
  if (points.size() > 1) r.baselines.push_back(points.back());
  return r;
}

SweepResult sweep_phase(const RunConfig& cfg, const std::vector<double>& phases, int workers) {
  return shared_baseline_sweep(cfg, "phase", phases, workers,
                               [](RunConfig& c, double v) { c.phase_ac = v; });
}

SweepResult sweep_amplitude(const RunConfig& cfg, const std::vector<double>& amplitudes,
                            int workers) {
  return shared_baseline_sweep(cfg, "amplitude", amplitudes, workers,
                               [](RunConfig& c, double v) { c.b_ac = v; });
}

SweepResult sweep_frequency(const RunConfig& cfg, const std::vector<double>& detunings,
                            int workers) {
  return shared_baseline_sweep(cfg, "detuning", detunings, workers, [](RunConfig& c, double v) {
    c.f_ac.reset();
    c.detuning = v;
  });
}

SweepResult sweep_gamma(const RunConfig& cfg, const std::vector<double>& gammas, int workers) {
  return paired_sweep(cfg, "gamma", gammas, workers,
                      [](RunConfig& c, double v) { c.gamma_y = v; });
}

SweepResult sweep_disorder(const RunConfig& cfg, const std::vector<double>& sigmas, int workers) {
  return paired_sweep(cfg, "sigma", sigmas, workers, [](RunConfig& c, double v) { c.sigma = v; });
}

DomeResult map_dome(const RunConfig& cfg, const std::vector<double>& gammas, int workers) {
  if (gammas.empty()) throw std::invalid_argument("dome needs at least one gamma");
  std::vector<PointJob> jobs;
  for (double g : gammas) {
    RunConfig c = cfg;
    c.gamma_y = g;
    jobs.push_back({c, "gamma", g});
    jobs.push_back({without_ac(c), "gamma", g});
  }
  auto points = run_points(jobs, workers, false);
  DomeResult d;
  d.gammas = gammas;
  d.cycles = cfg.cycles;
  const int kicks = make_schedule(cfg).kicks_per_cycle() * cfg.cycles;
  d.with_ac = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(gammas.size()), kicks, NAN);
  d.without_ac = d.with_ac;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    d.n_failed += p.n_failed;
    if (p.failed()) continue;
    Eigen::MatrixXd& m = i % 2 == 0 ? d.with_ac : d.without_ac;
    const auto row = static_cast<Eigen::Index>(i / 2);
    Eigen::Index col = 0;
    for (std::size_t s = 0; s < p.mean_trace.size() && col < kicks; ++s) {
      if (p.mean_trace.kind[s] == Readout::kick) m(row, col++) = p.mean_trace.ix[s];
    }
  }
  return d;
}

namespace {

std::string point_tag(const PointResult& p, std::size_t index) {
  return std::string(p.ac ? "p" : "b") + (index < 10 ? "0" : "") + std::to_string(index) +
         (p.ac ? "_ac" : "_noac");
}

TraceHeader trace_header(const PointResult& p, const SampleRecord* s) {
  TraceHeader h;
  h["protocol"] = p.schedule.protocol;
  h["B_ac"] = format_double(p.drive.amplitude);
  h["f_ac"] = format_double(p.drive.frequency);
  h["phase_ac"] = format_double(p.drive.phase);
  h["sigma"] = format_double(p.sigma);
  h["T"] = format_double(p.schedule.block_periods.empty() ? p.schedule.super_period
                                                          : p.schedule.block_periods.front());
  h["cycles"] = std::to_string(p.schedule.cycles);
  if (s) {
    h["schedule_hash"] = s->schedule_hash;
    h["graph_seed"] = std::to_string(s->graph_seed);
    h["disorder_seed"] = std::to_string(s->disorder_seed);
  } else {
    h["ensemble"] = "mean";
    std::string seeds, hashes;
    for (const auto& r : p.samples) {
      if (!r.ok) continue;
      seeds += (seeds.empty() ? "" : " ") + std::to_string(r.graph_seed);
      hashes += (hashes.empty() ? "" : " ") + r.schedule_hash;
    }
    h["graph_seeds"] = seeds;
    h["schedule_hash"] = hashes;
  }
  return h;
}

nlohmann::json point_json(const PointResult& p, const std::string& tag) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : p.samples) {
    nlohmann::json j = {{"index", s.index},
                        {"graph_seed", s.graph_seed},
                        {"disorder_seed", s.disorder_seed},
                        {"ok", s.ok}};
    if (s.ok) {
      j["F"] = s.fidelity;
      j["T2"] = s.lifetime.lifetime;
      j["T2_censored"] = s.lifetime.censored;
      j["J_spinlock"] = s.j_spinlock;
      j["schedule_hash"] = s.schedule_hash;
      j["trace"] = "traces/" + tag + "_s" + std::to_string(s.index) + ".csv";
    } else {
      j["error"] = s.error;
    }
    samples.push_back(j);
  }
  nlohmann::json j = {{"tag", tag},
                      {"parameter", p.parameter},
                      {"value", p.value},
                      {"ac", p.ac},
                      {"drive", to_json(p.drive)},
                      {"sigma", p.sigma},
                      {"schedule", to_json(p.schedule)},
                      {"T", p.schedule.block_periods},
                      {"f_res", p.schedule.resonance_frequencies()},
                      {"mean_F", p.mean_f},
                      {"n_ok", p.n_ok},
                      {"n_failed", p.n_failed},
                      {"T2", p.lifetime.lifetime},
                      {"T2_censored", p.lifetime.censored},
                      {"flips_at_T2", p.lifetime.flips},
                      {"mean_trace", "traces/" + tag + "_mean.csv"},
                      {"samples", samples}};
  j["std_F"] = p.std_f ? nlohmann::json(*p.std_f) : nlohmann::json(nullptr);
  if (p.oracle.j_spinlock > 0.0) {
    j["oracle"] = {{"B_eff", p.oracle.b_eff},
                   {"inverse_temperature", p.oracle.inverse_temperature},
                   {"m_plateau", p.oracle.m_plateau},
                   {"mu", p.oracle.mu},
                   {"J_spinlock", p.oracle.j_spinlock}};
  }
  return j;
}

void write_points(const std::vector<const PointResult*>& points, const fs::path& dir,
                  nlohmann::json& manifest, std::ofstream& summary, RunOutcome& outcome) {
  std::size_t ac_index = 0, base_index = 0;
  for (const PointResult* p : points) {
    const std::string tag = point_tag(*p, p->ac ? ac_index++ : base_index++);
    for (std::size_t j = 0; j < p->samples.size(); ++j) {
      const auto& s = p->samples[j];
      if (!s.ok) {
        outcome.failures.push_back(tag + " sample " + std::to_string(j) + ": " + s.error);
        continue;
      }
      if (j < p->traces.size() && !p->traces[j].empty()) {
        write_trace_csv(dir / "traces" / (tag + "_s" + std::to_string(j) + ".csv"), p->traces[j],
                        trace_header(*p, &s));
      }
    }
    if (p->failed()) {
      outcome.failures.push_back(tag + ": all samples failed");
    } else {
      write_trace_csv(dir / "traces" / (tag + "_mean.csv"), p->mean_trace, trace_header(*p, nullptr));
    }
    manifest["points"].push_back(point_json(*p, tag));
    const auto f = p->schedule.resonance_frequencies();
    summary << tag << ',' << p->parameter << ',' << format_double(p->value) << ','
            << (p->ac ? 1 : 0) << ',' << format_double(p->drive.amplitude) << ','
            << format_double(p->drive.frequency) << ',' << format_double(p->drive.phase) << ','
            << format_double(p->sigma) << ',' << format_double(p->mean_f) << ','
            << (p->std_f ? format_double(*p->std_f) : "") << ',' << p->n_ok << ','
            << p->n_failed << ',' << format_double(p->lifetime.lifetime) << ','
            << (p->lifetime.censored ? 1 : 0) << ','
            << format_double(p->schedule.block_periods.empty() ? p->schedule.super_period
                                                               : p->schedule.block_periods.front())
            << ',' << (f.empty() ? "" : format_double(f.front())) << '\n';
  }
}

}  // namespace

RunOutcome run_config(const RunConfig& cfg, const fs::path& out_dir, int workers) {
  validate(cfg);
  fs::create_directories(out_dir / "traces");
  fs::create_directories(out_dir / "graphs");
  RunOutcome outcome;

  nlohmann::json manifest = {{"schema", "pdtc-run/1"},
                             {"trace_schema", kTraceSchema},
                             {"config", to_json(cfg)},
                             {"cycles", cfg.cycles},
                             {"points", nlohmann::json::array()}};
  nlohmann::json graphs = nlohmann::json::array();
  for (int j = 0; j < cfg.n_samples; ++j) {
    const std::string name = "graphs/graph_" + std::to_string(j) + ".json";
    try {
      write_json(out_dir / name, to_json(ensemble_graph(cfg, j)));
      graphs.push_back({{"index", j}, {"seed", cfg.seed + j}, {"file", name}});
    } catch (const std::exception& e) {
      graphs.push_back({{"index", j}, {"seed", cfg.seed + j}, {"error", e.what()}});
    }
  }
  manifest["graphs"] = graphs;

  std::ofstream summary(out_dir / "summary.csv");
  summary << "tag,parameter,value,ac,B_ac,f_ac,phase_ac,sigma,mean_F,std_F,n_ok,n_failed,T2,"
             "T2_censored,T,f_res\n";

  if (cfg.experiment == "dome") {
    const DomeResult d = map_dome(cfg, cfg.sweep_values, workers);
    std::ofstream dome(out_dir / "dome.csv");
    dome << "gamma,kick,Ix_ac,Ix_noac\n";
    for (Eigen::Index i = 0; i < d.with_ac.rows(); ++i) {
      for (Eigen::Index c = 0; c < d.with_ac.cols(); ++c) {
        dome << format_double(d.gammas[i]) << ',' << c + 1 << ',' << format_double(d.with_ac(i, c))
             << ',' << format_double(d.without_ac(i, c)) << '\n';
      }
    }
    manifest["dome"] = {{"file", "dome.csv"}, {"gammas", d.gammas}, {"n_failed", d.n_failed}};
    if (d.n_failed > 0) outcome.failures.push_back(std::to_string(d.n_failed) + " dome samples failed");
  } else {
    SweepResult r;
    if (cfg.experiment == "run") {
      r = run_ensemble(cfg, workers);
    } else if (cfg.experiment == "noise") {
      r = sweep_disorder(cfg, cfg.sweep_values, workers);
    } else if (cfg.sweep_parameter == "phase") {
      r = sweep_phase(cfg, cfg.sweep_values, workers);
    } else if (cfg.sweep_parameter == "amplitude") {
      r = sweep_amplitude(cfg, cfg.sweep_values, workers);
    } else if (cfg.sweep_parameter == "detuning") {
      r = sweep_frequency(cfg, cfg.sweep_values, workers);
    } else if (cfg.sweep_parameter == "gamma") {
      r = sweep_gamma(cfg, cfg.sweep_values, workers);
    } else {
      r = sweep_disorder(cfg, cfg.sweep_values, workers);
    }
    std::vector<const PointResult*> all;
    for (const auto& p : r.points) all.push_back(&p);
    for (const auto& p : r.baselines) all.push_back(&p);
    write_points(all, out_dir, manifest, summary, outcome);
    if (cfg.protocol == Protocol::spin_lock && !r.points.empty() && !r.points.front().failed()) {
      const auto& p = r.points.front();
      const Spectrum s = phase_dft(p.mean_trace, 0.0, std::numeric_limits<double>::infinity());
      const auto peak = std::max_element(s.magnitude.begin() + 1, s.magnitude.end());
      manifest["phase_spectrum"] = {
          {"peak_frequency", s.frequency[static_cast<std::size_t>(peak - s.magnitude.begin())]},
          {"peak_magnitude", *peak},
          {"mean_magnitude", s.band_mean}};
    }
  }
  manifest["failures"] = outcome.failures;
  write_json(out_dir / "manifest.json", manifest);
  outcome.exit_code = outcome.failures.empty() ? 0 : 2;
  return outcome;
}

bool report_run(const fs::path& run_dir, std::ostream& out) {
  const fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    out << "missing " << manifest_path.string() << '\n';
    return false;
  }
  const nlohmann::json m = read_json(manifest_path);
  const auto& cfg = m.at("config");
  const Axis comp = cfg.at("protocol") == "single_tone" ? Axis::z : Axis::x;
  out << "run: " << cfg.at("name").get<std::string>() << "  experiment: "
      << cfg.at("experiment").get<std::string>() << "  spins: " << cfg.at("n_spins") << '\n';
  bool complete = true;
  out << std::left << std::setw(12) << "point" << std::setw(12) << "parameter" << std::setw(14)
      << "value" << std::setw(12) << "mean_F" << std::setw(12) << "std_F" << std::setw(12)
      << "F(mean)" << std::setw(14) << "T2'" << "ok/failed\n";
  for (const auto& p : m.at("points")) {
    const fs::path trace_path = run_dir / p.at("mean_trace").get<std::string>();
    std::string f_mean = "-", t2 = "-";
    if (fs::exists(trace_path)) {
      const auto lt = read_trace_csv(trace_path);
      f_mean = format_double(std::round(fidelity(lt.trace, comp).value * 1e4) / 1e4);
      const auto life = lifetime_1e(lt.trace, comp);
      t2 = format_double(std::round(life.lifetime * 1e3) / 1e3) + (life.censored ? "+" : "");
    } else if (p.at("n_ok").get<int>() > 0) {
      complete = false;
    }
    const auto round4 = [](double v) { return format_double(std::round(v * 1e4) / 1e4); };
    out << std::left << std::setw(12) << p.at("tag").get<std::string>() << std::setw(12)
        << p.at("parameter").get<std::string>() << std::setw(14)
        << round4(p.at("value").get<double>()) << std::setw(12)
        << round4(p.at("mean_F").get<double>()) << std::setw(12)
        << (p.at("std_F").is_null() ? std::string("-") : round4(p.at("std_F").get<double>()))
        << std::setw(12) << f_mean << std::setw(14) << t2 << p.at("n_ok") << '/'
        << p.at("n_failed") << '\n';
  }
  if (m.contains("dome")) out << "dome: " << (run_dir / "dome.csv").string() << '\n';
  if (m.contains("phase_spectrum")) out << "phase spectrum: " << m.at("phase_spectrum").dump() << '\n';
  for (const auto& f : m.at("failures")) out << "failure: " << f.get<std::string>() << '\n';
  return complete;
}

}  // namespace pdtc
