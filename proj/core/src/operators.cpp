#include "pdtc/operators.hpp"

#include <cmath>
#include <string>

namespace pdtc {

OperatorSet::OperatorSet(int n_spins) : n_spins_(n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) {
    throw DimensionError("unsupported number of spins: " + std::to_string(n_spins));
  }
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    collective_.push_back(pdtc::collective(n_spins, a));
    compiled_.emplace_back(collective_.back());
  }
}

OperatorSet build_operators(int n_spins) { return OperatorSet(n_spins); }

Eigen::Matrix3d dipolar_tensor(Axis axis, double j) {
  Eigen::Matrix3d c = -j * Eigen::Matrix3d::Identity();
  const int a = static_cast<int>(axis);
  c(a, a) += 3.0 * j;
  return c;
}

DipolarHamiltonian build_hdd(const SpinGraph& graph, const OperatorSet& ops,
                             std::optional<std::span<const double>> z_disorder) {
  if (graph.n_spins != ops.n_spins()) throw std::invalid_argument("graph/operator size mismatch");
  DipolarHamiltonian h;
  h.op = SpinOperator(graph.n_spins);
  for (int k = 0; k < graph.n_spins; ++k) {
    for (int l = k + 1; l < graph.n_spins; ++l) {
      h.op.add_pair(k, l, dipolar_tensor(Axis::z, graph.couplings(k, l)));
    }
  }
  if (z_disorder) {
    if (static_cast<int>(z_disorder->size()) != graph.n_spins) {
      throw std::invalid_argument("z disorder length must equal n_spins");
    }
    h.z_offsets.assign(z_disorder->begin(), z_disorder->end());
    for (int k = 0; k < graph.n_spins; ++k) h.op.add_field(k, Axis::z, h.z_offsets[k]);
  }
  h.compiled = MatrixFreeOperator(h.op);
  return h;
}

double rms_per_spin(const SpinOperator& op) {
  return op.rms_norm() / std::sqrt(static_cast<double>(op.n_spins()));
}

SpinLockHamiltonian build_hsl(const SpinGraph& graph, const OperatorSet& ops) {
  if (graph.n_spins != ops.n_spins()) throw std::invalid_argument("graph/operator size mismatch");
  SpinLockHamiltonian h;
  h.op = SpinOperator(graph.n_spins);
  for (int k = 0; k < graph.n_spins; ++k) {
    for (int l = k + 1; l < graph.n_spins; ++l) {
      h.op.add_pair(k, l, dipolar_tensor(Axis::x, -0.5 * graph.couplings(k, l)));
    }
  }
  h.compiled = MatrixFreeOperator(h.op);
  h.j_spinlock = rms_per_spin(h.op);
  return h;
}

Eigen::Matrix3d toggling_rotation(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

SpinOperator toggling_average(const DipolarHamiltonian& hdd, const OperatorSet& ops, int n_pulses,
                              double theta_x) {
  if (n_pulses < 0) throw std::invalid_argument("n_pulses must be >= 0");
  SpinOperator sum(ops.n_spins());
  for (int l = 0; l <= n_pulses; ++l) sum += hdd.op.rotated(toggling_rotation(l * theta_x));
  sum *= 1.0 / (n_pulses + 1);
  return sum;
}

}  // namespace pdtc
