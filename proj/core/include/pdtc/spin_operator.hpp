#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pdtc {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

/// Largest system handled by the matrix-free path.
inline constexpr int kMaxSpins = 24;

/// Thrown when an operator is requested for an unsupported system size.
class DimensionError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Spin axis label, also used as an index into 3-vectors (x=0, y=1, z=2).
enum class Axis { x = 0, y = 1, z = 2 };

/// Hermitian operator on L spin-1/2 sites of the form
///
///   H = c0 + sum_k h_k . I_k + sum_{k<l} sum_{ab} C_kl(a,b) I_k^a I_l^b
///
/// with I = sigma/2 and real coefficients. Basis state index bit k holds site
/// k, bit value 0 is spin up (I^z = +1/2).
class SpinOperator {
 public:
  SpinOperator() = default;
  explicit SpinOperator(int n_spins);

  int n_spins() const { return n_spins_; }
  std::uint64_t dimension() const { return std::uint64_t{1} << n_spins_; }

  SpinOperator& add_constant(double c);
  SpinOperator& add_field(int site, const Eigen::Vector3d& h);
  SpinOperator& add_field(int site, Axis axis, double h);
  SpinOperator& add_pair(int k, int l, const Eigen::Matrix3d& c);

  double constant() const { return constant_; }
  const Eigen::Vector3d& field(int site) const { return fields_[site]; }
  /// Coupling tensor for k < l.
  const Eigen::Matrix3d& pair(int k, int l) const { return pairs_[pair_index(k, l)]; }
  bool has_pairs() const;

  /// Global rotation I^a -> sum_b R(a,b) I^b applied to every site.
  SpinOperator rotated(const Eigen::Matrix3d& r) const;

  SpinOperator& operator+=(const SpinOperator& other);
  SpinOperator& operator-=(const SpinOperator& other);
  SpinOperator& operator*=(double s);
  friend SpinOperator operator+(SpinOperator a, const SpinOperator& b) { return a += b; }
  friend SpinOperator operator-(SpinOperator a, const SpinOperator& b) { return a -= b; }
  friend SpinOperator operator*(double s, SpinOperator a) { return a *= s; }

  /// sqrt(Tr(H^2) / 2^L), from the Pauli-string expansion.
  double rms_norm() const;
  /// Upper bound on the spectral norm.
  double norm_bound() const;
  /// True if every term commutes with the collective I^z.
  bool conserves_z(double tol = 0.0) const;

 private:
  std::size_t pair_index(int k, int l) const;

  int n_spins_ = 0;
  double constant_ = 0.0;
  std::vector<Eigen::Vector3d> fields_;
  std::vector<Eigen::Matrix3d> pairs_;  // upper triangle, row-major over k<l
};

/// Compiled matrix-free form of a SpinOperator. Immutable; apply() is
/// thread-safe.
class MatrixFreeOperator {
 public:
  MatrixFreeOperator() = default;
  explicit MatrixFreeOperator(const SpinOperator& op);

  int n_spins() const { return n_spins_; }
  std::size_t dimension() const { return diag_.size(); }

  /// out = H * in
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  /// out += s * H * in
  void apply_add(double s, std::span<const cplx> in, std::span<cplx> out) const;

  /// <a|H|b>
  cplx matrix_element(std::span<const cplx> a, std::span<const cplx> b) const;
  double expectation(std::span<const cplx> psi) const;

  const std::vector<double>& diagonal() const { return diag_; }

 private:
  struct PairFlip {
    std::uint64_t mask;
    int k, l;
    cplx amp[4];  // indexed by (bit_k << 1) | bit_l
    bool flip_flop_only;
  };
  struct SiteFlip {
    int k;
    cplx amp[2];  // indexed by bit_k
  };
  struct CorrelatedFlip {
    int k;         // flipped site
    int l;         // site contributing sigma^z
    cplx amp[2];   // indexed by bit_k, multiplied by s_l
  };

  int n_spins_ = 0;
  std::vector<double> diag_;
  std::vector<PairFlip> pair_flips_;
  std::vector<SiteFlip> site_flips_;
  std::vector<CorrelatedFlip> correlated_flips_;
};

/// Collective and single-site operators.
SpinOperator collective(int n_spins, Axis axis);
SpinOperator site_operator(int n_spins, int site, Axis axis);

/// Expectation values of I^x, I^y, I^z (collective, not normalized).
Eigen::Vector3d collective_expectations(std::span<const cplx> psi, int n_spins);

double norm(std::span<const cplx> psi);
cplx inner(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace pdtc
