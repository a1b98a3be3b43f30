#include "pdtc/sequence.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pdtc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

void require_cycles(int cycles) {
  if (cycles < 0) throw std::invalid_argument("cycles must be >= 0");
}

// Appends a segment at the running clock and advances it.
void push(PulseSchedule& s, double& clock, SegmentKind kind, double duration, double angle,
          Readout readout) {
  s.segments.push_back({kind, duration, angle, clock, readout});
  clock += duration;
}

// N x-pulses, each after a free interval, closed by free + y-pulse.
void push_block(PulseSchedule& s, double& clock, int n, double tau, double tau_x, double tau_y,
                double theta_x, double gamma_y) {
  for (int i = 0; i < n; ++i) {
    push(s, clock, SegmentKind::free, tau, 0.0, Readout::none);
    push(s, clock, SegmentKind::x_pulse, tau_x, theta_x, Readout::spin_lock);
  }
  push(s, clock, SegmentKind::free, tau, 0.0, Readout::none);
  push(s, clock, SegmentKind::y_pulse, tau_y, gamma_y, Readout::kick);
}

void finish(PulseSchedule& s, int cycles) {
  s.cycles = cycles;
  s.super_period = 0.0;
  for (const auto& seg : s.segments) s.super_period += seg.duration;
}

}  // namespace

double AcDrive::value(double t) const {
  return amplitude * std::sin(kTwoPi * frequency * t + phase);
}

double ac_integral(const AcDrive& drive, double t_start, double t_end) {
  if (t_end < t_start) throw std::invalid_argument("ac_integral: t_end < t_start");
  const double width = t_end - t_start;
  if (drive.amplitude == 0.0 || width == 0.0) return 0.0;
  const double omega = kTwoPi * drive.frequency;
  const double mid = 0.5 * (t_start + t_end);
  const double x = 0.5 * omega * width;
  // sinc form stays accurate for short windows and reduces to B sin(phase) w at f = 0
  const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
  return drive.amplitude * width * std::sin(omega * mid + drive.phase) * sinc;
}

std::vector<double> PulseSchedule::resonance_frequencies() const {
  std::vector<double> f;
  for (double t : block_periods) f.push_back(1.0 / (2.0 * t));
  return f;
}

int PulseSchedule::kicks_per_cycle() const {
  int n = 0;
  for (const auto& seg : segments) n += seg.readout == Readout::kick;
  return n;
}

DisorderRealization no_disorder(int n_spins) {
  DisorderRealization d;
  d.chi.assign(n_spins, 0.0);
  d.eta.assign(n_spins, 0.0);
  d.zeta.assign(n_spins, 0.0);
  return d;
}

DisorderRealization sample_disorder(double sigma, int n_spins, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (n_spins < 0) throw std::invalid_argument("n_spins must be >= 0");
  DisorderRealization d = no_disorder(n_spins);
  d.sigma = sigma;
  d.seed = seed;
  if (sigma == 0.0) return d;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5 * sigma, 0.5 * sigma);
  for (auto* v : {&d.chi, &d.eta, &d.zeta}) {
    for (auto& x : *v) x = u(rng);
  }
  return d;
}

PulseSchedule build_two_tone(int n_pulses, double tau, double tau_x, double tau_y, double theta_x,
                             double gamma_y, int cycles) {
  if (n_pulses < 0) throw std::invalid_argument("N must be >= 0");
  require_positive(tau, "tau");
  require_positive(tau_x, "tau_x");
  require_positive(tau_y, "tau_y");
  require_cycles(cycles);
  PulseSchedule s;
  s.protocol = "two_tone";
  s.tau = tau;
  s.tau_x = tau_x;
  s.tau_y = tau_y;
  s.theta_x = theta_x;
  s.gamma_y = gamma_y;
  const double period = n_pulses * (tau + tau_x) + tau + tau_y;
  s.origin = -(period - 0.5 * tau_y);
  double clock = 0.0;
  push_block(s, clock, n_pulses, tau, tau_x, tau_y, theta_x, gamma_y);
  s.block_pulses = {n_pulses};
  s.block_periods = {period};
  finish(s, cycles);
  return s;
}

PulseSchedule build_single_tone(double tau, double tau_y, double gamma_y, int cycles) {
  require_positive(tau, "tau");
  if (!(tau_y >= 0.0) || !(tau_y < tau)) throw std::invalid_argument("tau_y must lie in [0, tau)");
  require_cycles(cycles);
  PulseSchedule s;
  s.protocol = "single_tone";
  s.tau = tau;
  s.tau_y = tau_y;
  s.gamma_y = gamma_y;
  s.origin = -(tau - 0.5 * tau_y);
  double clock = 0.0;
  push(s, clock, SegmentKind::free, tau - tau_y, 0.0, Readout::none);
  push(s, clock, SegmentKind::y_pulse, tau_y, gamma_y, Readout::kick);
  s.block_pulses = {0};
  s.block_periods = {tau};
  finish(s, cycles);
  return s;
}

PulseSchedule build_three_tone(int n1, int n2, double tau, double tau_x, double tau_y,
                               double theta_x, double gamma_y, int cycles) {
  if (n1 < 0 || n2 < 0) throw std::invalid_argument("block sizes must be >= 0");
  if (n1 == n2) throw std::invalid_argument("three-tone blocks must differ (N1 == N2)");
  require_positive(tau, "tau");
  require_positive(tau_x, "tau_x");
  require_positive(tau_y, "tau_y");
  require_cycles(cycles);
  PulseSchedule s;
  s.protocol = "three_tone";
  s.tau = tau;
  s.tau_x = tau_x;
  s.tau_y = tau_y;
  s.theta_x = theta_x;
  s.gamma_y = gamma_y;
  const double t1 = n1 * (tau + tau_x) + tau + tau_y;
  const double t2 = n2 * (tau + tau_x) + tau + tau_y;
  s.origin = -(t1 - 0.5 * tau_y);
  double clock = 0.0;
  push_block(s, clock, n1, tau, tau_x, tau_y, theta_x, gamma_y);
  push_block(s, clock, n2, tau, tau_x, tau_y, theta_x, gamma_y);
  s.block_pulses = {n1, n2};
  s.block_periods = {t1, t2};
  finish(s, cycles);
  return s;
}

PulseSchedule build_spin_lock(double tau, double tau_x, double theta_x, int cycles) {
  require_positive(tau, "tau");
  require_positive(tau_x, "tau_x");
  require_cycles(cycles);
  PulseSchedule s;
  s.protocol = "spin_lock";
  s.tau = tau;
  s.tau_x = tau_x;
  s.theta_x = theta_x;
  double clock = 0.0;
  push(s, clock, SegmentKind::free, tau, 0.0, Readout::none);
  push(s, clock, SegmentKind::x_pulse, tau_x, theta_x, Readout::spin_lock);
  finish(s, cycles);
  return s;
}

const char* to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::free: return "free";
    case SegmentKind::x_pulse: return "x_pulse";
    case SegmentKind::y_pulse: return "y_pulse";
  }
  return "?";
}

const char* to_string(Readout r) {
  switch (r) {
    case Readout::none: return "none";
    case Readout::spin_lock: return "spin_lock";
    case Readout::kick: return "kick";
  }
  return "?";
}

namespace {

SegmentKind kind_from_string(const std::string& s) {
  if (s == "free") return SegmentKind::free;
  if (s == "x_pulse") return SegmentKind::x_pulse;
  if (s == "y_pulse") return SegmentKind::y_pulse;
  throw std::invalid_argument("unknown segment kind: " + s);
}

Readout readout_from_string(const std::string& s) {
  if (s == "none") return Readout::none;
  if (s == "spin_lock") return Readout::spin_lock;
  if (s == "kick") return Readout::kick;
  throw std::invalid_argument("unknown readout: " + s);
}

}  // namespace

nlohmann::json to_json(const PulseSchedule& s) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : s.segments) {
    segs.push_back({{"kind", to_string(seg.kind)},
                    {"duration", seg.duration},
                    {"angle", seg.angle},
                    {"t0", seg.t0},
                    {"readout", to_string(seg.readout)}});
  }
  return {{"protocol", s.protocol},
          {"cycles", s.cycles},
          {"origin", s.origin},
          {"super_period", s.super_period},
          {"block_pulses", s.block_pulses},
          {"block_periods", s.block_periods},
          {"f_res", s.resonance_frequencies()},
          {"tau", s.tau},
          {"tau_x", s.tau_x},
          {"tau_y", s.tau_y},
          {"theta_x", s.theta_x},
          {"gamma_y", s.gamma_y},
          {"segments", segs}};
}

PulseSchedule schedule_from_json(const nlohmann::json& j) {
  PulseSchedule s;
  s.protocol = j.at("protocol").get<std::string>();
  s.cycles = j.at("cycles").get<int>();
  s.origin = j.at("origin").get<double>();
  s.super_period = j.at("super_period").get<double>();
  s.block_pulses = j.at("block_pulses").get<std::vector<int>>();
  s.block_periods = j.at("block_periods").get<std::vector<double>>();
  s.tau = j.at("tau").get<double>();
  s.tau_x = j.at("tau_x").get<double>();
  s.tau_y = j.at("tau_y").get<double>();
  s.theta_x = j.at("theta_x").get<double>();
  s.gamma_y = j.at("gamma_y").get<double>();
  for (const auto& e : j.at("segments")) {
    s.segments.push_back({kind_from_string(e.at("kind").get<std::string>()),
                          e.at("duration").get<double>(), e.at("angle").get<double>(),
                          e.at("t0").get<double>(),
                          readout_from_string(e.at("readout").get<std::string>())});
  }
  return s;
}

nlohmann::json to_json(const AcDrive& d) {
  return {{"amplitude", d.amplitude}, {"frequency", d.frequency}, {"phase", d.phase}};
}

AcDrive drive_from_json(const nlohmann::json& j) {
  return {j.at("amplitude").get<double>(), j.at("frequency").get<double>(),
          j.at("phase").get<double>()};
}

nlohmann::json to_json(const DisorderRealization& d) {
  return {{"sigma", d.sigma}, {"seed", d.seed}, {"chi", d.chi}, {"eta", d.eta}, {"zeta", d.zeta}};
}

nlohmann::json schedule_record(const PulseSchedule& s, const AcDrive& drive,
                               const DisorderRealization& disorder) {
  return {{"schedule", to_json(s)}, {"drive", to_json(drive)}, {"disorder", to_json(disorder)}};
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string schedule_hash(const PulseSchedule& s, const AcDrive& drive,
                          const DisorderRealization& disorder) {
  return fnv1a_hex(schedule_record(s, drive, disorder).dump());
}

}  // namespace pdtc
