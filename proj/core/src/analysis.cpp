#include "pdtc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pdtc {

namespace {

double toggle(int parity) { return parity % 2 == 0 ? 1.0 : -1.0; }

std::vector<std::size_t> kick_samples(const TimeTrace& trace) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.kind[i] == Readout::kick) idx.push_back(i);
  }
  return idx;
}

}  // namespace

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + n / 2));
}

FidelityResult fidelity(const TimeTrace& trace, Axis component) {
  if (trace.empty()) throw std::invalid_argument("fidelity of an empty trace");
  const auto& y = trace.component(component);
  FidelityResult r;
  double sum = 0.0;
  for (std::size_t i : kick_samples(trace)) {
    if (r.n_samples == 0) r.t_first = trace.time[i];
    r.t_last = trace.time[i];
    sum += y[i] * toggle(trace.parity[i]);
    ++r.n_samples;
  }
  if (r.n_samples > 0) r.value = sum / r.n_samples;
  return r;
}

LifetimeFit lifetime_1e(const TimeTrace& trace, Axis component, double window) {
  LifetimeFit fit;
  if (trace.empty()) throw std::invalid_argument("lifetime of an empty trace");
  const auto& y = trace.component(component);
  const auto idx = kick_samples(trace);
  const double t_start = trace.time.front();
  fit.lifetime = trace.time.back() - t_start;
  fit.censored = true;
  if (idx.empty()) return fit;

  std::vector<double> t, env;
  for (std::size_t i : idx) {
    t.push_back(trace.time[i]);
    env.push_back(std::abs(y[i]));
  }
  if (window > 0.0) {
    std::vector<double> smooth(env.size());
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < env.size(); ++i) {
      while (t[i] - t[lo] > 0.5 * window) ++lo;
      while (hi + 1 < env.size() && t[hi + 1] - t[i] <= 0.5 * window) ++hi;
      smooth[i] = median(std::vector<double>(env.begin() + lo, env.begin() + hi + 1));
    }
    env.swap(smooth);
  }

  double t_prev = t.front(), e_prev = env.front();
  double ref = env.front();
  std::size_t first = 0;
  if (trace.kind.front() == Readout::none) {
    ref = std::abs(y.front());
    t_prev = t_start;
    e_prev = ref;
  } else {
    first = 1;
  }
  const double level = ref / std::numbers::e;
  if (!(ref > 0.0)) return fit;
  for (std::size_t i = first; i < env.size(); ++i) {
    if (env[i] < level) {
      const double frac = (e_prev - level) / (e_prev - env[i]);
      fit.lifetime = t_prev + frac * (t[i] - t_prev) - t_start;
      fit.flips = static_cast<int>(i);
      fit.censored = false;
      return fit;
    }
    t_prev = t[i];
    e_prev = env[i];
  }
  fit.flips = static_cast<int>(env.size());
  return fit;
}

double effective_field(const AcDrive& drive, double tau_y, double gamma_y) {
  if (!(gamma_y > 0.0)) throw std::invalid_argument("gamma_y must be positive");
  return std::sin(drive.phase) * drive.amplitude * tau_y / gamma_y;
}

PrethermalPrediction prethermal_oracle(double b_eff, double j_spinlock, double mu) {
  if (!(j_spinlock > 0.0)) throw std::invalid_argument("J_spinlock must be positive");
  PrethermalPrediction p;
  p.b_eff = b_eff;
  p.mu = mu;
  p.j_spinlock = j_spinlock;
  const double denom = b_eff * b_eff + j_spinlock * j_spinlock;
  p.inverse_temperature = -mu * b_eff / denom;
  p.m_plateau = mu * b_eff * b_eff / denom;
  return p;
}

BeatEstimate beat_frequency(const TimeTrace& trace, Axis component, double min_separation) {
  const auto& y = trace.component(component);
  const auto idx = kick_samples(trace);
  std::vector<double> crossings;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    const std::size_t a = idx[j - 1], b = idx[j];
    const double da = y[a] * toggle(trace.parity[a]);
    const double db = y[b] * toggle(trace.parity[b]);
    if ((da > 0.0) == (db > 0.0) || da == db) continue;
    const double tc = trace.time[a] + da / (da - db) * (trace.time[b] - trace.time[a]);
    if (!crossings.empty() && tc - crossings.back() < min_separation) continue;
    crossings.push_back(tc);
  }
  BeatEstimate est;
  est.crossings = static_cast<int>(crossings.size());
  if (crossings.size() < 2) return est;
  // zeros of cos(2 pi df t) are spaced by 1 / (2 df)
  const double spacing =
      (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  est.frequency = 1.0 / (2.0 * spacing);
  est.censored = false;
  return est;
}

Spectrum phase_dft(const TimeTrace& trace, double band_lo, double band_hi) {
  std::vector<double> t, p;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.kind[i] != Readout::spin_lock) continue;
    t.push_back(trace.time[i]);
    p.push_back(trace.phi[i]);
  }
  const std::size_t n = t.size();
  if (n < 4) throw std::invalid_argument("phase_dft needs at least 4 post-pulse samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * dt) {
      throw std::invalid_argument("phase_dft requires uniformly spaced samples");
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    double d = p[i] - p[i - 1];
    d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
    p[i] = p[i - 1] + d;
  }
  const double m = mean(p);
  for (auto& x : p) x -= m;

  Spectrum s;
  const std::size_t bins = n / 2 + 1;
  double band_sum = 0.0;
  int band_count = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    std::complex<double> acc;
    const double w = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) acc += p[i] * std::polar(1.0, w * static_cast<double>(i));
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    const double mag = std::abs(acc) * (edge ? 1.0 : 2.0) / static_cast<double>(n);
    const double f = static_cast<double>(k) / (static_cast<double>(n) * dt);
    s.frequency.push_back(f);
    s.magnitude.push_back(mag);
    if (f >= band_lo && f <= band_hi) {
      band_sum += mag;
      ++band_count;
    }
  }
  s.band_mean = band_count ? band_sum / band_count : 0.0;
  return s;
}

TimeTrace average_traces(const std::vector<TimeTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("no traces to average");
  TimeTrace out = traces.front();
  const double inv = 1.0 / static_cast<double>(traces.size());
  for (std::size_t j = 1; j < traces.size(); ++j) {
    const auto& t = traces[j];
    if (t.size() != out.size()) throw std::invalid_argument("trace lengths differ");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.parity[i] != out.parity[i] || std::abs(t.time[i] - out.time[i]) > 1e-9) {
        throw std::invalid_argument("traces are not sampled at identical instants");
      }
      out.ix[i] += t.ix[i];
      out.iy[i] += t.iy[i];
      out.iz[i] += t.iz[i];
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.ix[i] *= inv;
    out.iy[i] *= inv;
    out.iz[i] *= inv;
    out.s[i] = std::hypot(out.ix[i], out.iy[i]);
    double p = std::atan2(out.iy[i], out.ix[i]);
    if (p == -std::numbers::pi) p = std::numbers::pi;
    out.phi[i] = p;
  }
  return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

LinearFit sin2_fit(const std::vector<double>& phi, const std::vector<double>& y) {
  std::vector<double> s;
  for (double p : phi) s.push_back(std::sin(p) * std::sin(p));
  return linear_fit(s, y);
}

}  // namespace pdtc
