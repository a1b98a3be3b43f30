#include "pdtc/dense.hpp"

#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace pdtc::dense {

namespace {

void check_dense_size(int n_spins) {
  if (n_spins < 1 || n_spins > kMaxDenseSpins) {
    throw DimensionError("dense path supports 1.." + std::to_string(kMaxDenseSpins) +
                         " spins, got " + std::to_string(n_spins));
  }
}

// Kronecker product of per-site 2x2 factors, site L-1 leftmost.
Matrix embed(int n_spins, const std::vector<std::pair<int, Eigen::Matrix2cd>>& factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (int site = n_spins - 1; site >= 0; --site) {
    Eigen::Matrix2cd f = Eigen::Matrix2cd::Identity();
    for (const auto& [s, m] : factors) {
      if (s == site) f = m;
    }
    Matrix next = Eigen::kroneckerProduct(out, f).eval();
    out.swap(next);
  }
  return out;
}

}  // namespace

Eigen::Matrix2cd spin_half(Axis axis) {
  using c = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (axis) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, c(0, -1), c(0, 1), 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
  }
  return 0.5 * m;
}

Matrix site_matrix(int n_spins, int site, Axis axis) {
  check_dense_size(n_spins);
  return embed(n_spins, {{site, spin_half(axis)}});
}

Matrix collective_matrix(int n_spins, Axis axis) {
  check_dense_size(n_spins);
  const auto dim = Eigen::Index{1} << n_spins;
  Matrix out = Matrix::Zero(dim, dim);
  for (int k = 0; k < n_spins; ++k) out += site_matrix(n_spins, k, axis);
  return out;
}

Matrix to_dense(const SpinOperator& op) {
  const int n = op.n_spins();
  check_dense_size(n);
  const auto dim = Eigen::Index{1} << n;
  constexpr Axis kAxes[3] = {Axis::x, Axis::y, Axis::z};
  Matrix out = op.constant() * Matrix::Identity(dim, dim);
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < 3; ++a) {
      const double h = op.field(k)(a);
      if (h != 0.0) out += h * embed(n, {{k, spin_half(kAxes[a])}});
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      const Eigen::Matrix3d& c = op.pair(k, l);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (c(a, b) == 0.0) continue;
          out += c(a, b) * embed(n, {{k, spin_half(kAxes[a])}, {l, spin_half(kAxes[b])}});
        }
      }
    }
  }
  return out;
}

Matrix expm_hermitian(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::VectorXd& w = es.eigenvalues();
  Vector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -t * w(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix rotation(int n_spins, Axis axis, double angle) {
  const Eigen::Matrix2cd s = spin_half(axis);
  // exp(-i angle sigma/2) = cos(angle/2) - i sin(angle/2) sigma
  const Eigen::Matrix2cd single =
      std::cos(angle / 2) * Eigen::Matrix2cd::Identity() -
      std::complex<double>(0, 2.0 * std::sin(angle / 2)) * s;
  std::vector<std::pair<int, Eigen::Matrix2cd>> factors;
  for (int k = 0; k < n_spins; ++k) factors.emplace_back(k, single);
  return embed(n_spins, factors);
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace pdtc::dense
