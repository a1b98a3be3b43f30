#include "pdtc/propagator.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pdtc {

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); }

}  // namespace

QuantumState initial_state(const OperatorSet& ops, Axis axis, double time) {
  const std::size_t dim = ops.dimension();
  QuantumState st;
  st.time = time;
  switch (axis) {
    case Axis::z:
      st.psi.assign(dim, cplx{});
      st.psi[0] = 1.0;
      break;
    case Axis::x:
      st.psi.assign(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
      break;
    default:
      throw std::invalid_argument("initial state must be polarized along x or z");
  }
  return st;
}

const std::vector<double>& TimeTrace::component(Axis a) const {
  switch (a) {
    case Axis::x: return ix;
    case Axis::y: return iy;
    case Axis::z: return iz;
  }
  return ix;
}

void TimeTrace::record(double t, int kick_parity, Readout r, const Eigen::Vector3d& collective) {
  const double scale = 2.0 / n_spins;
  const double x = collective.x() * scale, y = collective.y() * scale, z = collective.z() * scale;
  time.push_back(t);
  parity.push_back(kick_parity);
  kind.push_back(r);
  ix.push_back(x);
  iy.push_back(y);
  iz.push_back(z);
  s.push_back(std::hypot(x, y));
  double p = std::atan2(y, x);
  if (p == -std::numbers::pi) p = std::numbers::pi;
  phi.push_back(p);
}

Propagator::Propagator(const DipolarHamiltonian& hdd, const AcDrive& drive,
                       const DisorderRealization& disorder, PropagatorOptions opt)
    : hdd_(&hdd), drive_(drive), disorder_(disorder), opt_(opt), n_spins_(hdd.op.n_spins()) {
  if (opt_.substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (disorder_.chi.empty()) disorder_ = no_disorder(n_spins_);
  if (static_cast<int>(disorder_.chi.size()) != n_spins_ ||
      static_cast<int>(disorder_.eta.size()) != n_spins_) {
    throw std::invalid_argument("disorder realization size does not match the Hamiltonian");
  }
  bool any_zeta = false;
  for (double z : disorder_.zeta) any_zeta = any_zeta || z != 0.0;
  if (any_zeta && hdd.z_offsets != disorder_.zeta) {
    throw std::invalid_argument("H_dd must be built with the realization's z offsets");
  }
  if (opt_.engine == Engine::dense) {
    hdd_dense_ = dense::to_dense(hdd.op);
  } else {
    hdd_bounds_ = estimate_bounds(hdd.compiled, hdd.op.norm_bound());
  }
}

std::vector<Eigen::Vector3d> Propagator::site_fields(const Segment& seg, double theta,
                                                     double width_fraction) const {
  std::vector<Eigen::Vector3d> f(n_spins_, Eigen::Vector3d(0.0, 0.0, theta));
  const double width = seg.duration * width_fraction;
  const double angle = seg.angle * width_fraction;
  for (int k = 0; k < n_spins_; ++k) {
    if (seg.kind == SegmentKind::x_pulse) f[k].x() = angle + width * disorder_.chi[k];
    if (seg.kind == SegmentKind::y_pulse) f[k].y() = angle + width * disorder_.eta[k];
  }
  return f;
}

SpinOperator Propagator::segment_generator(const Segment& seg, double t0) const {
  SpinOperator g = seg.duration * hdd_->op;
  const auto f = site_fields(seg, ac_integral(drive_, t0, t0 + seg.duration), 1.0);
  for (int k = 0; k < n_spins_; ++k) g.add_field(k, f[k]);
  return g;
}

void Propagator::check_norm(const QuantumState& state) const {
  const double drift = std::abs(norm(state.psi) - 1.0);
  if (drift > opt_.norm_tolerance) {
    throw PropagationError("state norm drifted by " + std::to_string(drift));
  }
}

void Propagator::apply_piece(QuantumState& state, const Segment& seg, double t0, double width,
                             double fraction, bool inverse) {
  const double theta = ac_integral(drive_, t0, t0 + width);
  const double sign = inverse ? -1.0 : 1.0;
  auto fields = site_fields(seg, theta, fraction);

  if (opt_.engine == Engine::dense) {
    const CacheKey key{static_cast<int>(seg.kind), seg.angle * fraction, width,
                       std::llround(theta * 1e12), inverse};
    auto it = dense_cache_.find(key);
    if (it == dense_cache_.end()) {
      dense::Matrix g = width * hdd_dense_;
      SpinOperator f(n_spins_);
      for (int k = 0; k < n_spins_; ++k) f.add_field(k, fields[k]);
      g += dense::to_dense(f);
      it = dense_cache_.emplace(key, dense::expm_hermitian(g, sign)).first;
    }
    Eigen::Map<dense::Vector> v(state.psi.data(), static_cast<Eigen::Index>(state.psi.size()));
    v = (it->second * v).eval();
    return;
  }

  for (auto& h : fields) h *= sign;
  Generator g(n_spins_);
  g.add_term(hdd_->compiled, sign * width, hdd_bounds_);
  g.set_fields(fields);
  applications_ += apply_exponential(g, state.psi, ws_, {opt_.expm_tolerance});
}

void Propagator::apply_segment(QuantumState& state, const Segment& seg, double t0, bool inverse) {
  const double t_end = t0 + seg.duration;
  if (!same_time(state.time, inverse ? t_end : t0)) {
    throw PropagationError("state clock " + std::to_string(state.time) +
                           " does not match segment boundary");
  }
  const int n = opt_.substeps;
  const double width = seg.duration / n;
  for (int i = 0; i < n; ++i) {
    // pieces run backwards in time when inverting
    const int j = inverse ? n - 1 - i : i;
    apply_piece(state, seg, t0 + j * width, width, 1.0 / n, inverse);
  }
  check_norm(state);
  state.time = inverse ? t0 : t_end;
}

TimeTrace Propagator::evolve(QuantumState& state, const PulseSchedule& schedule) {
  if (static_cast<std::size_t>(std::size_t{1} << n_spins_) != state.psi.size()) {
    throw std::invalid_argument("state dimension does not match the Hamiltonian");
  }
  TimeTrace trace;
  trace.n_spins = n_spins_;
  if (!same_time(state.time, schedule.start_time())) {
    throw PropagationError("state clock does not match the schedule start");
  }
  int parity = 0;
  trace.record(state.time, parity, Readout::none, collective_expectations(state.psi, n_spins_));
  for (int m = 0; m < schedule.cycles; ++m) {
    const double base = schedule.origin + m * schedule.super_period;
    for (const auto& seg : schedule.segments) {
      const double t0 = base + seg.t0;
      apply_segment(state, seg, t0);
      if (seg.readout == Readout::none) continue;
      if (seg.readout == Readout::kick) ++parity;
      trace.record(state.time, parity, seg.readout, collective_expectations(state.psi, n_spins_));
    }
  }
  return trace;
}

void Propagator::evolve_inverse(QuantumState& state, const PulseSchedule& schedule) {
  if (!same_time(state.time, schedule.end_time())) {
    throw PropagationError("state clock does not match the schedule end");
  }
  for (int m = schedule.cycles - 1; m >= 0; --m) {
    const double base = schedule.origin + m * schedule.super_period;
    for (auto it = schedule.segments.rbegin(); it != schedule.segments.rend(); ++it) {
      const double t0 = base + it->t0;
      apply_segment(state, *it, t0, true);
    }
  }
}

TimeTrace simulate(const DipolarHamiltonian& hdd, const OperatorSet& ops,
                   const PulseSchedule& schedule, const AcDrive& drive,
                   const DisorderRealization& disorder, Axis initial_axis,
                   PropagatorOptions opt) {
  Propagator p(hdd, drive, disorder, opt);
  QuantumState st = initial_state(ops, initial_axis, schedule.start_time());
  return p.evolve(st, schedule);
}

namespace {

Eigen::Matrix2cd spin_rotation(const Eigen::Vector3d& h) {
  return dense::expm_hermitian(h.x() * dense::spin_half(Axis::x) +
                               h.y() * dense::spin_half(Axis::y) +
                               h.z() * dense::spin_half(Axis::z));
}

}  // namespace

Eigen::Matrix2cd single_particle_two_period(int n_pulses, double theta_x, double gamma_y,
                                            double tau, double tau_y, const AcDrive& drive) {
  if (n_pulses < 0 || !(tau > 0.0) || !(tau_y >= 0.0)) {
    throw std::invalid_argument("invalid single-particle schedule");
  }
  const double period = (n_pulses + 1) * tau + tau_y;
  double t = -(period - 0.5 * tau_y);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd ux = spin_rotation({theta_x, 0.0, 0.0});
  for (int cycle = 0; cycle < 2; ++cycle) {
    for (int i = 0; i <= n_pulses; ++i) {
      u = spin_rotation({0.0, 0.0, ac_integral(drive, t, t + tau)}) * u;
      t += tau;
      if (i < n_pulses) u = ux * u;
    }
    u = spin_rotation({0.0, gamma_y, ac_integral(drive, t, t + tau_y)}) * u;
    t += tau_y;
  }
  return u;
}

double single_particle_residual(int n_pulses, double theta_x, double gamma_y, double tau,
                                double tau_y, const AcDrive& drive) {
  const Eigen::Matrix2cd u =
      single_particle_two_period(n_pulses, theta_x, gamma_y, tau, tau_y, drive);
  return dense::operator_norm(u + Eigen::Matrix2cd::Identity());
}

Eigen::Matrix2cd factorized_y_pulse(double gamma, double alpha) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double cz = alpha * std::sin(gamma) / gamma;
  const double cx = -alpha * (1.0 - std::cos(gamma)) / gamma;
  return spin_rotation({0.0, gamma, 0.0}) * spin_rotation({cx, 0.0, cz});
}

}  // namespace pdtc
