#include "pdtc/spin_operator.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace pdtc {

namespace {

constexpr cplx kI{0.0, 1.0};

inline double spin_sign(int bit) { return bit == 0 ? 1.0 : -1.0; }

// Inserts a zero bit at position `pos` of `r`.
inline std::uint64_t insert_zero(std::uint64_t r, int pos) {
  const std::uint64_t low = r & ((std::uint64_t{1} << pos) - 1);
  return ((r >> pos) << (pos + 1)) | low;
}

void check_size(int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) {
    throw DimensionError("unsupported number of spins: " + std::to_string(n_spins));
  }
}

}  // namespace

SpinOperator::SpinOperator(int n_spins) : n_spins_(n_spins) {
  check_size(n_spins);
  fields_.assign(n_spins, Eigen::Vector3d::Zero());
  pairs_.assign(static_cast<std::size_t>(n_spins) * (n_spins - 1) / 2, Eigen::Matrix3d::Zero());
}

std::size_t SpinOperator::pair_index(int k, int l) const {
  if (k >= l || k < 0 || l >= n_spins_) throw std::out_of_range("pair index requires 0 <= k < l < L");
  // rows 0..k-1 hold (L-1) + (L-2) + ... entries
  const auto kk = static_cast<std::size_t>(k);
  const auto n = static_cast<std::size_t>(n_spins_);
  return kk * (2 * n - kk - 1) / 2 + static_cast<std::size_t>(l - k - 1);
}

SpinOperator& SpinOperator::add_constant(double c) {
  constant_ += c;
  return *this;
}

SpinOperator& SpinOperator::add_field(int site, const Eigen::Vector3d& h) {
  fields_.at(site) += h;
  return *this;
}

SpinOperator& SpinOperator::add_field(int site, Axis axis, double h) {
  fields_.at(site)(static_cast<int>(axis)) += h;
  return *this;
}

SpinOperator& SpinOperator::add_pair(int k, int l, const Eigen::Matrix3d& c) {
  if (k < l) {
    pairs_[pair_index(k, l)] += c;
  } else if (l < k) {
    pairs_[pair_index(l, k)] += c.transpose();
  } else {
    throw std::invalid_argument("pair term needs two distinct sites");
  }
  return *this;
}

bool SpinOperator::has_pairs() const {
  for (const auto& c : pairs_) {
    if (!c.isZero(0.0)) return true;
  }
  return false;
}

SpinOperator SpinOperator::rotated(const Eigen::Matrix3d& r) const {
  SpinOperator out = *this;
  for (auto& h : out.fields_) h = r.transpose() * h;
  for (auto& c : out.pairs_) c = r.transpose() * c * r;
  return out;
}

SpinOperator& SpinOperator::operator+=(const SpinOperator& other) {
  if (n_spins_ == 0) {
    *this = other;
    return *this;
  }
  if (other.n_spins_ != n_spins_) throw std::invalid_argument("size mismatch in operator sum");
  constant_ += other.constant_;
  for (std::size_t i = 0; i < fields_.size(); ++i) fields_[i] += other.fields_[i];
  for (std::size_t i = 0; i < pairs_.size(); ++i) pairs_[i] += other.pairs_[i];
  return *this;
}

SpinOperator& SpinOperator::operator-=(const SpinOperator& other) {
  SpinOperator neg = other;
  neg *= -1.0;
  return *this += neg;
}

SpinOperator& SpinOperator::operator*=(double s) {
  constant_ *= s;
  for (auto& h : fields_) h *= s;
  for (auto& c : pairs_) c *= s;
  return *this;
}

double SpinOperator::rms_norm() const {
  double t = constant_ * constant_;
  for (const auto& h : fields_) t += 0.25 * h.squaredNorm();
  for (const auto& c : pairs_) t += c.squaredNorm() / 16.0;
  return std::sqrt(t);
}

double SpinOperator::norm_bound() const {
  double b = std::abs(constant_);
  for (const auto& h : fields_) b += 0.5 * h.norm();
  for (const auto& c : pairs_) {
    if (c.isZero(0.0)) continue;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(c);
    b += 0.25 * svd.singularValues().sum();
  }
  return b;
}

bool SpinOperator::conserves_z(double tol) const {
  for (const auto& h : fields_) {
    if (std::abs(h.x()) > tol || std::abs(h.y()) > tol) return false;
  }
  for (const auto& c : pairs_) {
    if (std::abs(c(0, 0) - c(1, 1)) > tol || std::abs(c(0, 1) + c(1, 0)) > tol) return false;
    if (std::abs(c(0, 2)) > tol || std::abs(c(1, 2)) > tol || std::abs(c(2, 0)) > tol ||
        std::abs(c(2, 1)) > tol) {
      return false;
    }
  }
  return true;
}

MatrixFreeOperator::MatrixFreeOperator(const SpinOperator& op) : n_spins_(op.n_spins()) {
  check_size(n_spins_);
  const std::uint64_t dim = op.dimension();
  diag_.assign(dim, op.constant());

  for (int k = 0; k < n_spins_; ++k) {
    const Eigen::Vector3d& h = op.field(k);
    if (h.z() != 0.0) {
      for (std::uint64_t i = 0; i < dim; ++i) diag_[i] += 0.5 * h.z() * spin_sign((i >> k) & 1);
    }
    if (h.x() != 0.0 || h.y() != 0.0) {
      SiteFlip f{k, {}};
      for (int b = 0; b < 2; ++b) f.amp[b] = 0.5 * (h.x() + kI * spin_sign(b) * h.y());
      site_flips_.push_back(f);
    }
  }

  for (int k = 0; k < n_spins_; ++k) {
    for (int l = k + 1; l < n_spins_; ++l) {
      const Eigen::Matrix3d& c = op.pair(k, l);
      if (c.isZero(0.0)) continue;
      if (c(2, 2) != 0.0) {
        for (std::uint64_t i = 0; i < dim; ++i) {
          diag_[i] += 0.25 * c(2, 2) * spin_sign((i >> k) & 1) * spin_sign((i >> l) & 1);
        }
      }
      if (c(0, 0) != 0.0 || c(1, 1) != 0.0 || c(0, 1) != 0.0 || c(1, 0) != 0.0) {
        PairFlip f{(std::uint64_t{1} << k) | (std::uint64_t{1} << l), k, l, {}, true};
        for (int bk = 0; bk < 2; ++bk) {
          for (int bl = 0; bl < 2; ++bl) {
            const double sk = spin_sign(bk), sl = spin_sign(bl);
            f.amp[(bk << 1) | bl] =
                0.25 * (c(0, 0) - c(1, 1) * sk * sl + kI * (c(0, 1) * sl + c(1, 0) * sk));
          }
        }
        f.flip_flop_only = (f.amp[0] == cplx{} && f.amp[3] == cplx{});
        pair_flips_.push_back(f);
      }
      // sigma^{x,y}_k sigma^z_l
      if (c(0, 2) != 0.0 || c(1, 2) != 0.0) {
        CorrelatedFlip f{k, l, {}};
        for (int b = 0; b < 2; ++b) f.amp[b] = 0.25 * (c(0, 2) + kI * spin_sign(b) * c(1, 2));
        correlated_flips_.push_back(f);
      }
      // sigma^z_k sigma^{x,y}_l
      if (c(2, 0) != 0.0 || c(2, 1) != 0.0) {
        CorrelatedFlip f{l, k, {}};
        for (int b = 0; b < 2; ++b) f.amp[b] = 0.25 * (c(2, 0) + kI * spin_sign(b) * c(2, 1));
        correlated_flips_.push_back(f);
      }
    }
  }
}

void MatrixFreeOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t dim = diag_.size();
  for (std::size_t i = 0; i < dim; ++i) out[i] = 0.0;
  apply_add(1.0, in, out);
}

void MatrixFreeOperator::apply_add(double s, std::span<const cplx> in, std::span<cplx> out) const {
  const std::uint64_t dim = diag_.size();
  if (in.size() != dim || out.size() != dim) throw std::invalid_argument("state dimension mismatch");
  for (std::uint64_t i = 0; i < dim; ++i) out[i] += (s * diag_[i]) * in[i];

  const std::uint64_t quarter = dim >> 2;
  for (const auto& f : pair_flips_) {
    const std::uint64_t bk = std::uint64_t{1} << f.k, bl = std::uint64_t{1} << f.l;
    const cplx a01 = s * f.amp[1], a10 = s * f.amp[2];
    if (f.flip_flop_only) {
      for (std::uint64_t r = 0; r < quarter; ++r) {
        const std::uint64_t i00 = insert_zero(insert_zero(r, f.k), f.l);
        const std::uint64_t i01 = i00 | bl, i10 = i00 | bk;
        out[i10] += a01 * in[i01];
        out[i01] += a10 * in[i10];
      }
    } else {
      const cplx a00 = s * f.amp[0], a11 = s * f.amp[3];
      for (std::uint64_t r = 0; r < quarter; ++r) {
        const std::uint64_t i00 = insert_zero(insert_zero(r, f.k), f.l);
        const std::uint64_t i01 = i00 | bl, i10 = i00 | bk, i11 = i00 | bk | bl;
        out[i10] += a01 * in[i01];
        out[i01] += a10 * in[i10];
        out[i11] += a00 * in[i00];
        out[i00] += a11 * in[i11];
      }
    }
  }

  const std::uint64_t half = dim >> 1;
  for (const auto& f : site_flips_) {
    const std::uint64_t bk = std::uint64_t{1} << f.k;
    const cplx a0 = s * f.amp[0], a1 = s * f.amp[1];
    for (std::uint64_t r = 0; r < half; ++r) {
      const std::uint64_t i0 = insert_zero(r, f.k), i1 = i0 | bk;
      out[i1] += a0 * in[i0];
      out[i0] += a1 * in[i1];
    }
  }

  for (const auto& f : correlated_flips_) {
    const std::uint64_t bk = std::uint64_t{1} << f.k;
    const cplx a0 = s * f.amp[0], a1 = s * f.amp[1];
    for (std::uint64_t r = 0; r < half; ++r) {
      const std::uint64_t i0 = insert_zero(r, f.k), i1 = i0 | bk;
      const double sl = spin_sign((i0 >> f.l) & 1);
      out[i1] += sl * a0 * in[i0];
      out[i0] += sl * a1 * in[i1];
    }
  }
}

cplx MatrixFreeOperator::matrix_element(std::span<const cplx> a, std::span<const cplx> b) const {
  StateVector hb(b.size());
  apply(b, hb);
  return inner(a, hb);
}

double MatrixFreeOperator::expectation(std::span<const cplx> psi) const {
  return matrix_element(psi, psi).real();
}

SpinOperator collective(int n_spins, Axis axis) {
  SpinOperator op(n_spins);
  for (int k = 0; k < n_spins; ++k) op.add_field(k, axis, 1.0);
  return op;
}

SpinOperator site_operator(int n_spins, int site, Axis axis) {
  SpinOperator op(n_spins);
  op.add_field(site, axis, 1.0);
  return op;
}

Eigen::Vector3d collective_expectations(std::span<const cplx> psi, int n_spins) {
  const std::uint64_t dim = std::uint64_t{1} << n_spins;
  if (psi.size() != dim) throw std::invalid_argument("state dimension mismatch");
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::uint64_t i = 0; i < dim; ++i) {
    const double p = std::norm(psi[i]);
    const int down = std::popcount(i);
    sz += p * (n_spins - 2 * down);
  }
  const std::uint64_t half = dim >> 1;
  for (int k = 0; k < n_spins; ++k) {
    const std::uint64_t bk = std::uint64_t{1} << k;
    for (std::uint64_t r = 0; r < half; ++r) {
      const std::uint64_t i0 = insert_zero(r, k), i1 = i0 | bk;
      const cplx z = std::conj(psi[i1]) * psi[i0];
      sx += 2.0 * z.real();
      sy -= 2.0 * z.imag();
    }
  }
  return 0.5 * Eigen::Vector3d(sx, sy, sz);
}

double norm(std::span<const cplx> psi) {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return std::sqrt(s);
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace pdtc
