#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace pdtc {

using Vec3 = Eigen::Vector3d;

/// Thrown when rejection sampling cannot place a spin within its draw budget.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when no axis with vanishing total coupling can be located.
class OrientationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random cluster of spin-1/2 nuclei with secular dipolar couplings.
///
/// couplings(k, l) = coupling_scale * (3 cos^2(theta_kl) - 1) / r_kl^3, where
/// theta_kl is the angle between r_l - r_k and `axis`. Lengths are in units of
/// the sampling scale, couplings in angular-frequency units.
struct SpinGraph {
  int n_spins = 0;
  std::vector<Vec3> positions;
  Vec3 axis = Vec3::UnitZ();
  Eigen::MatrixXd couplings;
  double coupling_scale = 1.0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::uint64_t seed = 0;

  double coupling(int k, int l) const { return couplings(k, l); }
};

struct CouplingStats {
  double median_abs = 0.0;
  double max_abs = 0.0;
  double sum = 0.0;      // sum over k<l of J_kl
  double sum_abs = 0.0;  // sum over k<l of |J_kl|
};

/// Default rejection budget per placed spin.
inline constexpr int kDefaultDrawBudget = 100000;

/// Draws spins one by one in a cube of side n^(1/3) * r_max. Each new spin is
/// at least r_min from every placed spin and within r_max of at least one.
SpinGraph sample_graph(int n_spins, double r_min, double r_max, std::uint64_t seed,
                       int draw_budget = kDefaultDrawBudget);

/// Builds a graph from explicit positions (axis +z unless given).
SpinGraph make_graph(std::vector<Vec3> positions, const Vec3& axis = Vec3::UnitZ(),
                     double coupling_scale = 1.0);

/// Dipolar coupling matrix for the given positions and field axis.
Eigen::MatrixXd dipolar_couplings(const std::vector<Vec3>& positions, const Vec3& axis,
                                  double coupling_scale);

/// Sum over k<l of J_kl as a function of the field axis.
double total_coupling(const SpinGraph& graph, const Vec3& axis);

/// Rotates the field axis (positions fixed) so that sum_{k<l} J_kl vanishes.
/// The crossing nearest to the current axis is chosen; a graph that already
/// satisfies the condition to `rel_tol` (relative to sum_{k<l} |scale|/r^3)
/// is returned unchanged.
SpinGraph orient_graph(const SpinGraph& graph, double rel_tol = 1e-9);

CouplingStats coupling_stats(const SpinGraph& graph);

/// Rescales coupling_scale so that the median |J_kl| equals `target`.
SpinGraph normalize_median(const SpinGraph& graph, double target = 1.0);

/// True when every pair is at least r_min apart and every spin has a neighbour
/// within r_max.
bool satisfies_constraints(const SpinGraph& graph, double slack = 1e-12);

nlohmann::json to_json(const SpinGraph& graph);
SpinGraph graph_from_json(const nlohmann::json& j);

}  // namespace pdtc
