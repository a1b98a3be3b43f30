#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pdtc {

/// AC field B(t) = amplitude * sin(2 pi frequency t + phase). The amplitude is
/// in angular-frequency units (field times gyromagnetic ratio).
struct AcDrive {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;

  double value(double t) const;
};

/// Exact integral of the AC field over [t_start, t_end].
double ac_integral(const AcDrive& drive, double t_start, double t_end);

enum class SegmentKind { free, x_pulse, y_pulse };

/// Which samples a segment boundary emits.
enum class Readout {
  none,
  spin_lock,  // after an x-pulse; kick parity unchanged
  kick,       // after a y-pulse; kick parity incremented
};

struct Segment {
  SegmentKind kind = SegmentKind::free;
  double duration = 0.0;
  double angle = 0.0;  // theta_x or gamma_y, zero for free evolution
  double t0 = 0.0;     // start time within cycle 0
  Readout readout = Readout::none;
};

/// One super-period of segments repeated `cycles` times. Cycle m starts at
/// origin + m * super_period. Times are in units of 1/J.
///
/// The two- and three-tone builders put the time origin at the center of the
/// first y-pulse, so an AC phase of pi/2 places field extrema at y-pulse
/// centers.
struct PulseSchedule {
  std::string protocol;
  std::vector<Segment> segments;
  int cycles = 0;
  double origin = 0.0;
  double super_period = 0.0;
  std::vector<int> block_pulses;      // x-pulses per kick block
  std::vector<double> block_periods;  // realized period of each block
  double tau = 0.0, tau_x = 0.0, tau_y = 0.0;
  double theta_x = 0.0, gamma_y = 0.0;

  double duration() const { return cycles * super_period; }
  double start_time() const { return origin; }
  double end_time() const { return origin + duration(); }
  /// Realized resonance 1/(2 T_i) of each block.
  std::vector<double> resonance_frequencies() const;
  int kicks_per_cycle() const;
};

/// Per-site static errors: x-pulse rate errors chi, y-pulse rate errors eta
/// and z offsets zeta, each uniform in [-sigma/2, sigma/2].
struct DisorderRealization {
  std::vector<double> chi, eta, zeta;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  bool empty() const { return sigma == 0.0; }
};

DisorderRealization sample_disorder(double sigma, int n_spins, std::uint64_t seed);
DisorderRealization no_disorder(int n_spins);

/// Per period: N x-pulses, each preceded by a free interval tau, then a free
/// interval tau and one y-pulse. Period T = N (tau + tau_x) + tau + tau_y.
/// Samples follow every x-pulse and every y-pulse.
PulseSchedule build_two_tone(int n_pulses, double tau, double tau_x, double tau_y, double theta_x,
                             double gamma_y, int cycles);

/// Kicks spaced by tau: free tau - tau_y, then a y-pulse of width tau_y
/// (zero allowed). Samples follow every kick.
PulseSchedule build_single_tone(double tau, double tau_y, double gamma_y, int cycles);

/// Alternating two-tone blocks with n1 and n2 x-pulses, each closed by a
/// y-pulse. One cycle holds both blocks.
PulseSchedule build_three_tone(int n1, int n2, double tau, double tau_x, double tau_y,
                               double theta_x, double gamma_y, int cycles);

/// Spin-lock train only: free tau then x-pulse, repeated `cycles` times with a
/// sample after every pulse.
PulseSchedule build_spin_lock(double tau, double tau_x, double theta_x, int cycles);

const char* to_string(SegmentKind kind);
const char* to_string(Readout r);

nlohmann::json to_json(const PulseSchedule& s);
PulseSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AcDrive& d);
AcDrive drive_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DisorderRealization& d);

/// Everything needed to reproduce a propagation: schedule, drive and disorder.
nlohmann::json schedule_record(const PulseSchedule& s, const AcDrive& drive,
                               const DisorderRealization& disorder);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);
std::string schedule_hash(const PulseSchedule& s, const AcDrive& drive,
                          const DisorderRealization& disorder);

}  // namespace pdtc
