#pragma once

// Dense reference construction. Everything here is built from explicit
// Kronecker products of Pauli matrices and shares no code with the
// matrix-free path, so the two can be checked against each other.

#include <Eigen/Dense>

#include "pdtc/spin_operator.hpp"

namespace pdtc::dense {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest system for which dense matrices are built.
inline constexpr int kMaxDenseSpins = 12;

/// Spin-1/2 matrix I^axis = sigma^axis / 2 in the (up, down) basis.
Eigen::Matrix2cd spin_half(Axis axis);

/// I_site^axis embedded in the 2^L space (site 0 is the least significant bit).
Matrix site_matrix(int n_spins, int site, Axis axis);
Matrix collective_matrix(int n_spins, Axis axis);

/// Dense matrix of a SpinOperator assembled term by term from Kronecker
/// products.
Matrix to_dense(const SpinOperator& op);

/// exp(-i t H) for Hermitian H via eigendecomposition.
Matrix expm_hermitian(const Matrix& h, double t = 1.0);

/// Global rotation exp(-i angle I^axis).
Matrix rotation(int n_spins, Axis axis, double angle);

Matrix commutator(const Matrix& a, const Matrix& b);

/// Spectral (operator 2-) norm.
double operator_norm(const Matrix& a);

}  // namespace pdtc::dense
