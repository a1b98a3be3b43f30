#include "pdtc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace pdtc {

namespace {

// Orthonormal frame (e1, e2, a) with `a` the given unit vector.
std::pair<Vec3, Vec3> complete_frame(const Vec3& a) {
  const Vec3 trial = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 e1 = (trial - trial.dot(a) * a).normalized();
  Vec3 e2 = a.cross(e1);
  return {e1, e2};
}

Vec3 on_meridian(const Vec3& a, const Vec3& e1, const Vec3& e2, double polar, double azimuth) {
  return std::cos(polar) * a +
         std::sin(polar) * (std::cos(azimuth) * e1 + std::sin(azimuth) * e2);
}

}  // namespace

Eigen::MatrixXd dipolar_couplings(const std::vector<Vec3>& positions, const Vec3& axis,
                                  double coupling_scale) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  const Vec3 n_hat = axis.normalized();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      const Vec3 d = positions[l] - positions[k];
      const double r = d.norm();
      const double c = d.dot(n_hat) / r;
      const double value = coupling_scale * (3.0 * c * c - 1.0) / (r * r * r);
      j(k, l) = value;
      j(l, k) = value;
    }
  }
  return j;
}

SpinGraph make_graph(std::vector<Vec3> positions, const Vec3& axis, double coupling_scale) {
  if (positions.size() < 2) throw std::invalid_argument("graph needs at least two spins");
  SpinGraph g;
  g.n_spins = static_cast<int>(positions.size());
  g.positions = std::move(positions);
  g.axis = axis.normalized();
  g.coupling_scale = coupling_scale;
  g.couplings = dipolar_couplings(g.positions, g.axis, g.coupling_scale);
  return g;
}

SpinGraph sample_graph(int n_spins, double r_min, double r_max, std::uint64_t seed,
                       int draw_budget) {
  if (n_spins < 2) throw std::invalid_argument("n_spins must be >= 2");
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("require 0 < r_min < r_max");
  }
  const double side = std::cbrt(static_cast<double>(n_spins)) * r_max;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, side);
  auto draw = [&] { return Vec3(coord(rng), coord(rng), coord(rng)); };

  std::vector<Vec3> placed;
  placed.reserve(n_spins);
  placed.push_back(draw());
  const double rmin2 = r_min * r_min;
  const double rmax2 = r_max * r_max;
  while (static_cast<int>(placed.size()) < n_spins) {
    bool accepted = false;
    for (int attempt = 0; attempt < draw_budget && !accepted; ++attempt) {
      const Vec3 candidate = draw();
      bool too_close = false;
      bool has_neighbour = false;
      for (const auto& p : placed) {
        const double d2 = (candidate - p).squaredNorm();
        if (d2 < rmin2) {
          too_close = true;
          break;
        }
        if (d2 <= rmax2) has_neighbour = true;
      }
      if (!too_close && has_neighbour) {
        placed.push_back(candidate);
        accepted = true;
      }
    }
    if (!accepted) {
      throw SamplingError("could not place spin " + std::to_string(placed.size()) + " of " +
                          std::to_string(n_spins) + " after " + std::to_string(draw_budget) +
                          " draws (r_min/r_max infeasible?)");
    }
  }
  SpinGraph g = make_graph(std::move(placed));
  g.r_min = r_min;
  g.r_max = r_max;
  g.seed = seed;
  return g;
}

double total_coupling(const SpinGraph& graph, const Vec3& axis) {
  const Vec3 n_hat = axis.normalized();
  double sum = 0.0;
  for (int k = 0; k < graph.n_spins; ++k) {
    for (int l = k + 1; l < graph.n_spins; ++l) {
      const Vec3 d = graph.positions[l] - graph.positions[k];
      const double r = d.norm();
      const double c = d.dot(n_hat) / r;
      sum += (3.0 * c * c - 1.0) / (r * r * r);
    }
  }
  return graph.coupling_scale * sum;
}

SpinGraph orient_graph(const SpinGraph& graph, double rel_tol) {
  if (graph.n_spins < 2) throw std::invalid_argument("orient_graph needs >= 2 spins");
  const auto stats = coupling_stats(graph);
  // orientation-free magnitude: sum_{k<l} |scale| / r^3
  double scale = 0.0;
  for (int k = 0; k < graph.n_spins; ++k) {
    for (int l = k + 1; l < graph.n_spins; ++l) {
      const double r = (graph.positions[l] - graph.positions[k]).norm();
      scale += std::abs(graph.coupling_scale) / (r * r * r);
    }
  }
  if (scale == 0.0 || std::abs(stats.sum) <= rel_tol * scale) return graph;

  const Vec3 a = graph.axis.normalized();
  const auto [e1, e2] = complete_frame(a);
  auto f = [&](double polar, double azimuth) {
    return total_coupling(graph, on_meridian(a, e1, e2, polar, azimuth));
  };

  // Coarse scan along meridians leaving the current axis; keep the smallest
  // polar angle at which the sign flips.
  constexpr int kAzimuths = 72;
  constexpr int kPolar = 180;
  const double f0 = stats.sum;
  double best_lo = 0.0, best_hi = 0.0, best_az = 0.0;
  bool found = false;
  for (int ia = 0; ia < kAzimuths; ++ia) {
    const double az = 2.0 * std::numbers::pi * ia / kAzimuths;
    double prev = 0.0;
    for (int ip = 1; ip <= kPolar; ++ip) {
      const double polar = (std::numbers::pi / 2.0) * ip / kPolar;
      if (found && polar >= best_hi) break;
      const double v = f(polar, az);
      if (std::signbit(v) != std::signbit(f0) || v == 0.0) {
        best_lo = prev;
        best_hi = polar;
        best_az = az;
        found = true;
        break;
      }
      prev = polar;
    }
  }
  if (!found) {
    throw OrientationError("no sign change of the total coupling found over the axis grid");
  }

  double lo = best_lo, hi = best_hi;
  double f_lo = f(lo, best_az);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid, best_az);
    if (std::abs(fm) <= 0.25 * rel_tol * scale || mid == lo || mid == hi) {
      lo = hi = mid;
      break;
    }
    if (std::signbit(fm) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  SpinGraph out = graph;
  out.axis = on_meridian(a, e1, e2, 0.5 * (lo + hi), best_az).normalized();
  out.couplings = dipolar_couplings(out.positions, out.axis, out.coupling_scale);
  const double residual = std::abs(coupling_stats(out).sum);
  if (residual > rel_tol * scale) {
    throw OrientationError("bisection did not reach the requested tolerance");
  }
  return out;
}

CouplingStats coupling_stats(const SpinGraph& graph) {
  CouplingStats s;
  std::vector<double> mags;
  mags.reserve(static_cast<std::size_t>(graph.n_spins) * (graph.n_spins - 1) / 2);
  for (int k = 0; k < graph.n_spins; ++k) {
    for (int l = k + 1; l < graph.n_spins; ++l) {
      const double v = graph.couplings(k, l);
      mags.push_back(std::abs(v));
      s.sum += v;
      s.sum_abs += std::abs(v);
      s.max_abs = std::max(s.max_abs, std::abs(v));
    }
  }
  if (mags.empty()) return s;
  std::sort(mags.begin(), mags.end());
  const std::size_t m = mags.size();
  s.median_abs = (m % 2 == 1) ? mags[m / 2] : 0.5 * (mags[m / 2 - 1] + mags[m / 2]);
  return s;
}

SpinGraph normalize_median(const SpinGraph& graph, double target) {
  const double median = coupling_stats(graph).median_abs;
  if (!(median > 0.0)) throw std::invalid_argument("graph has vanishing median coupling");
  SpinGraph out = graph;
  const double factor = target / median;
  out.coupling_scale *= factor;
  out.couplings = dipolar_couplings(out.positions, out.axis, out.coupling_scale);
  return out;
}

bool satisfies_constraints(const SpinGraph& graph, double slack) {
  for (int k = 0; k < graph.n_spins; ++k) {
    bool neighbour = false;
    for (int l = 0; l < graph.n_spins; ++l) {
      if (l == k) continue;
      const double d = (graph.positions[k] - graph.positions[l]).norm();
      if (d < graph.r_min - slack) return false;
      if (d <= graph.r_max + slack) neighbour = true;
    }
    if (!neighbour) return false;
  }
  return true;
}

nlohmann::json to_json(const SpinGraph& graph) {
  nlohmann::json j;
  j["n_spins"] = graph.n_spins;
  j["seed"] = graph.seed;
  j["r_min"] = graph.r_min;
  j["r_max"] = graph.r_max;
  j["coupling_scale"] = graph.coupling_scale;
  j["axis"] = {graph.axis.x(), graph.axis.y(), graph.axis.z()};
  auto& pos = j["positions"] = nlohmann::json::array();
  for (const auto& p : graph.positions) pos.push_back({p.x(), p.y(), p.z()});
  auto& cj = j["couplings"] = nlohmann::json::array();
  for (int k = 0; k < graph.n_spins; ++k) {
    std::vector<double> row(graph.n_spins);
    for (int l = 0; l < graph.n_spins; ++l) row[l] = graph.couplings(k, l);
    cj.push_back(row);
  }
  return j;
}

SpinGraph graph_from_json(const nlohmann::json& j) {
  std::vector<Vec3> positions;
  for (const auto& p : j.at("positions")) {
    positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
  }
  const auto& a = j.at("axis");
  SpinGraph g = make_graph(std::move(positions),
                           Vec3(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()),
                           j.at("coupling_scale").get<double>());
  g.seed = j.value("seed", std::uint64_t{0});
  g.r_min = j.value("r_min", 0.0);
  g.r_max = j.value("r_max", 0.0);
  return g;
}

}  // namespace pdtc
