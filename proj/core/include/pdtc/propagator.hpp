#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "pdtc/dense.hpp"
#include "pdtc/expm.hpp"
#include "pdtc/operators.hpp"
#include "pdtc/sequence.hpp"

namespace pdtc {

/// Norm drift or clock mismatch during propagation.
class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuantumState {
  StateVector psi;
  double time = 0.0;
};

/// Product state fully polarized along +x or +z.
QuantumState initial_state(const OperatorSet& ops, Axis axis, double time = 0.0);

/// Observables per readout, normalized per spin by L/2.
struct TimeTrace {
  int n_spins = 0;
  std::vector<double> time;
  std::vector<int> parity;  // y-kicks applied so far
  std::vector<Readout> kind;
  std::vector<double> ix, iy, iz, s, phi;

  std::size_t size() const { return time.size(); }
  bool empty() const { return time.empty(); }
  const std::vector<double>& component(Axis a) const;
  void record(double t, int kick_parity, Readout r, const Eigen::Vector3d& collective);
};

enum class Engine { matrix_free, dense };

struct PropagatorOptions {
  Engine engine = Engine::matrix_free;
  double expm_tolerance = 1e-15;
  double norm_tolerance = 1e-9;
  /// Substeps per segment. 1 is the quasi-static form; larger values give a
  /// time-ordered reference with the AC field integrated per substep.
  int substeps = 1;
};

/// Propagates states through pulse schedules for one Hamiltonian, drive and
/// disorder realization. Not thread-safe; use one instance per trajectory.
///
/// Segment generators (d = duration, theta = AC integral over the segment):
///   free    : d H_dd + theta I^z
///   x_pulse : sum_l (theta_x + d chi_l) I_l^x + theta I^z + d H_dd
///   y_pulse : sum_l (gamma_y + d eta_l) I_l^y + theta I^z + d H_dd
/// Static z offsets enter through H_dd.
class Propagator {
 public:
  Propagator(const DipolarHamiltonian& hdd, const AcDrive& drive,
             const DisorderRealization& disorder, PropagatorOptions opt = {});

  int n_spins() const { return n_spins_; }
  const PropagatorOptions& options() const { return opt_; }

  /// Generator of a segment starting at absolute time t0.
  SpinOperator segment_generator(const Segment& seg, double t0) const;

  /// Applies exp(-i G) (or exp(+i G) when `inverse`) for the segment that
  /// starts at absolute time t0. The state clock must read t0 (or the segment
  /// end when inverting).
  void apply_segment(QuantumState& state, const Segment& seg, double t0, bool inverse = false);

  /// Runs all cycles, sampling at the initial time and at readout markers.
  TimeTrace evolve(QuantumState& state, const PulseSchedule& schedule);

  /// Applies the exact inverse of the whole schedule (reversed segments,
  /// negated generators). The state must sit at the schedule end.
  void evolve_inverse(QuantumState& state, const PulseSchedule& schedule);

  std::size_t dense_cache_size() const { return dense_cache_.size(); }
  std::uint64_t operator_applications() const { return applications_; }

 private:
  std::vector<Eigen::Vector3d> site_fields(const Segment& seg, double theta, double scale) const;
  void apply_piece(QuantumState& state, const Segment& seg, double t0, double width,
                   double angle_fraction, bool inverse);
  void check_norm(const QuantumState& state) const;

  const DipolarHamiltonian* hdd_;
  AcDrive drive_;
  DisorderRealization disorder_;
  PropagatorOptions opt_;
  int n_spins_;
  SpectralBounds hdd_bounds_;
  ExpmWorkspace ws_;
  std::uint64_t applications_ = 0;
  using CacheKey = std::tuple<int, double, double, long long, bool>;
  std::map<CacheKey, dense::Matrix> dense_cache_;
  dense::Matrix hdd_dense_;
};

/// Convenience wrapper: one trajectory from the polarized initial state.
TimeTrace simulate(const DipolarHamiltonian& hdd, const OperatorSet& ops,
                   const PulseSchedule& schedule, const AcDrive& drive,
                   const DisorderRealization& disorder, Axis initial_axis,
                   PropagatorOptions opt = {});

/// Non-interacting two-period propagator of one spin for the two-tone drive
/// with instantaneous x-pulses (spacing tau) and y-pulses of width tau_y
/// (zero allowed), origin at the first y-pulse center.
Eigen::Matrix2cd single_particle_two_period(int n_pulses, double theta_x, double gamma_y,
                                            double tau, double tau_y, const AcDrive& drive);

/// Spectral norm of U_sp^2 + 1.
double single_particle_residual(int n_pulses, double theta_x, double gamma_y, double tau,
                                double tau_y, const AcDrive& drive);

/// First-order factorization of a y-rotation with a simultaneous z field,
///   exp(-i(g I^y + a I^z)) ~ exp(-i g I^y) exp(-i a [(sin g/g) I^z - ((1 - cos g)/g) I^x]),
/// which for g = pi is exp(-i pi I^y) exp(+i (2a/pi) I^x).
Eigen::Matrix2cd factorized_y_pulse(double gamma, double alpha);

}  // namespace pdtc
