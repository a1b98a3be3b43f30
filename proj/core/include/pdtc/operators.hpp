#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pdtc/lattice.hpp"
#include "pdtc/spin_operator.hpp"

namespace pdtc {

/// Collective spin operators I^x, I^y, I^z for L spins, compiled for
/// matrix-free application. Site operators are produced on demand.
class OperatorSet {
 public:
  explicit OperatorSet(int n_spins);

  int n_spins() const { return n_spins_; }
  std::uint64_t dimension() const { return std::uint64_t{1} << n_spins_; }

  const SpinOperator& collective(Axis a) const { return collective_[static_cast<int>(a)]; }
  const MatrixFreeOperator& compiled(Axis a) const { return compiled_[static_cast<int>(a)]; }
  SpinOperator site(int k, Axis a) const { return site_operator(n_spins_, k, a); }

 private:
  int n_spins_;
  std::vector<SpinOperator> collective_;
  std::vector<MatrixFreeOperator> compiled_;
};

OperatorSet build_operators(int n_spins);

/// Secular dipolar Hamiltonian sum_{k<l} J_kl (3 I_k^z I_l^z - I_k.I_l),
/// optionally with on-site z offsets sum_l zeta_l I_l^z.
struct DipolarHamiltonian {
  SpinOperator op;
  MatrixFreeOperator compiled;
  std::vector<double> z_offsets;  // empty when no disorder was supplied
};

DipolarHamiltonian build_hdd(const SpinGraph& graph, const OperatorSet& ops,
                             std::optional<std::span<const double>> z_disorder = std::nullopt);

/// Spin-lock Hamiltonian, the quarter-turn toggling average of H_dd:
///   H_SL = -1/2 sum_{k<l} J_kl (3 I_k^x I_l^x - I_k.I_l),
/// which commutes with I^x. `j_spinlock` is the infinite-temperature RMS
/// per spin, sqrt(Tr(H_SL^2) / (2^L L)).
struct SpinLockHamiltonian {
  SpinOperator op;
  MatrixFreeOperator compiled;
  double j_spinlock = 0.0;
};

SpinLockHamiltonian build_hsl(const SpinGraph& graph, const OperatorSet& ops);

/// Infinite-temperature RMS per spin of any operator.
double rms_per_spin(const SpinOperator& op);

/// Pair coupling tensor of the dipolar form along `axis` with strength j:
/// j (3 a a^T - 1).
Eigen::Matrix3d dipolar_tensor(Axis axis, double j);

/// Rotation matrix R with R_x(-phi) I^a R_x(phi) = sum_b R(a,b) I^b, where
/// R_x(phi) = exp(-i phi I^x).
Eigen::Matrix3d toggling_rotation(double phi);

/// (1/(N+1)) sum_{l=0..N} R_x(-l theta) H R_x(l theta).
SpinOperator toggling_average(const DipolarHamiltonian& hdd, const OperatorSet& ops, int n_pulses,
                              double theta_x);

}  // namespace pdtc
