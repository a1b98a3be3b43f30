#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pdtc/spin_operator.hpp"

namespace pdtc {

/// Closed interval containing the spectrum of a Hermitian operator.
struct SpectralBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Lanczos estimate of the extreme eigenvalues, widened by a safety margin and
/// clipped to the rigorous bound +-`norm_bound`.
SpectralBounds estimate_bounds(const MatrixFreeOperator& op, double norm_bound, int steps = 80);

/// Hermitian generator G = sum_i s_i H_i + sum_k h_k . I_k, where the H_i are
/// shared many-body operators and the site fields are owned by the generator.
class Generator {
 public:
  explicit Generator(int n_spins);

  void add_term(const MatrixFreeOperator& op, double scale, SpectralBounds bounds);
  void set_fields(const std::vector<Eigen::Vector3d>& fields);

  int n_spins() const { return n_spins_; }
  bool single_site() const { return terms_.empty(); }
  const std::vector<Eigen::Vector3d>& fields() const { return fields_; }

  /// out = G * in
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  SpectralBounds bounds() const;

 private:
  struct Term {
    const MatrixFreeOperator* op;
    double scale;
    SpectralBounds bounds;
  };
  int n_spins_;
  std::vector<Term> terms_;
  std::vector<Eigen::Vector3d> fields_;
  SpinOperator field_spec_;
  mutable std::optional<MatrixFreeOperator> field_op_;
  bool has_fields_ = false;
};

/// Scratch buffers reused across exponential applications.
struct ExpmWorkspace {
  StateVector t0, t1, t2, acc;
};

struct ExpmOptions {
  double tolerance = 1e-13;  // truncation threshold on Chebyshev coefficients
};

/// psi <- exp(-i G) psi. Pure site-field generators are applied exactly as a
/// product of 2x2 rotations; otherwise a Chebyshev expansion is used.
/// Returns the number of operator applications.
int apply_exponential(const Generator& g, StateVector& psi, ExpmWorkspace& ws,
                      const ExpmOptions& opt = {});

/// psi <- prod_k exp(-i h_k . I_k) psi.
void apply_site_rotations(const std::vector<Eigen::Vector3d>& fields, StateVector& psi);

}  // namespace pdtc
