#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdtc/propagator.hpp"
#include "pdtc/sequence.hpp"

namespace pdtc {

struct FidelityResult {
  double value = 0.0;
  int n_samples = 0;
  double t_first = 0.0;
  double t_last = 0.0;
};

/// F = (1/N') sum_i <I^comp(t_i)> (-1)^parity(t_i) over post-kick samples.
FidelityResult fidelity(const TimeTrace& trace, Axis component = Axis::x);

struct LifetimeFit {
  double lifetime = 0.0;  // time from trace start to the 1/e crossing
  int flips = 0;          // kicks before the crossing
  bool censored = false;  // no crossing: lifetime is the trace span, a lower bound
  std::string method = "1/e sliding median";
};

/// 1/e crossing of the post-kick envelope |<I^comp>|, smoothed by a centered
/// sliding median over `window` (time units; 0 disables smoothing). The
/// reference level is the initial sample.
LifetimeFit lifetime_1e(const TimeTrace& trace, Axis component = Axis::x, double window = 0.0);

/// Signed effective x field sin(phase) * B * tau_y / gamma_y.
double effective_field(const AcDrive& drive, double tau_y, double gamma_y);

struct PrethermalPrediction {
  double b_eff = 0.0;
  double inverse_temperature = 0.0;
  double m_plateau = 0.0;
  double mu = 1.0;
  double j_spinlock = 0.0;
};

/// 1/T = -mu B / (B^2 + J^2), m = mu B^2 / (B^2 + J^2).
PrethermalPrediction prethermal_oracle(double b_eff, double j_spinlock, double mu = 1.0);

struct BeatEstimate {
  double frequency = 0.0;
  int crossings = 0;
  bool censored = true;
};

/// Beat frequency from sign changes of the parity-demodulated post-kick
/// signal. Sign changes closer than `min_separation` to the previous one are
/// ignored (0 keeps all).
BeatEstimate beat_frequency(const TimeTrace& trace, Axis component = Axis::x,
                            double min_separation = 0.0);

struct Spectrum {
  std::vector<double> frequency;
  std::vector<double> magnitude;  // single-sided amplitude: a sinusoid of amplitude A reads A
  double band_mean = 0.0;
};

/// DFT of the unwrapped phase over post-x-pulse samples. Throws when the
/// samples are not uniformly spaced.
Spectrum phase_dft(const TimeTrace& trace, double band_lo, double band_hi);

/// Pointwise mean of traces sampled at identical times.
TimeTrace average_traces(const std::vector<TimeTrace>& traces);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log y against log x.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);
/// Fit y = a sin^2(phi) + b; slope holds a, intercept holds b.
LinearFit sin2_fit(const std::vector<double>& phi, const std::vector<double>& y);

double mean(const std::vector<double>& v);
/// Sample standard deviation; nullopt for fewer than two values.
std::optional<double> sample_std(const std::vector<double>& v);
double median(std::vector<double> v);

}  // namespace pdtc
