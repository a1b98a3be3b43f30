#include "pdtc/expm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pdtc {

namespace {

inline std::uint64_t insert_zero(std::uint64_t r, int pos) {
  const std::uint64_t low = r & ((std::uint64_t{1} << pos) - 1);
  return ((r >> pos) << (pos + 1)) | low;
}

}  // namespace

SpectralBounds estimate_bounds(const MatrixFreeOperator& op, double norm_bound, int steps) {
  const std::size_t dim = op.dimension();
  steps = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(steps), dim));
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;
  std::vector<StateVector> basis;
  StateVector v(dim);
  for (auto& x : v) x = cplx(gauss(rng), gauss(rng));
  const double n0 = norm(v);
  for (auto& x : v) x /= n0;

  std::vector<double> alpha, beta;
  StateVector w(dim);
  basis.push_back(v);
  for (int j = 0; j < steps; ++j) {
    op.apply(basis[j], w);
    const double a = inner(basis[j], w).real();
    alpha.push_back(a);
    // full reorthogonalization keeps the Ritz values clean
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const cplx p = inner(q, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= p * q[i];
      }
    }
    const double b = norm(w);
    if (b < 1e-12 || j + 1 == steps) break;
    beta.push_back(b);
    for (auto& x : w) x /= b;
    basis.push_back(w);
  }
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  const double margin = 0.02 * (hi - lo) + 1e-8 * (1.0 + norm_bound);
  lo = std::max(lo - margin, -norm_bound);
  hi = std::min(hi + margin, norm_bound);
  return {lo, hi};
}

Generator::Generator(int n_spins) : n_spins_(n_spins), fields_(n_spins, Eigen::Vector3d::Zero()) {}

void Generator::add_term(const MatrixFreeOperator& op, double scale, SpectralBounds bounds) {
  if (op.n_spins() != n_spins_) throw std::invalid_argument("generator term size mismatch");
  if (scale == 0.0) return;
  terms_.push_back({&op, scale, bounds});
}

void Generator::set_fields(const std::vector<Eigen::Vector3d>& fields) {
  if (static_cast<int>(fields.size()) != n_spins_) throw std::invalid_argument("field size mismatch");
  fields_ = fields;
  SpinOperator f(n_spins_);
  has_fields_ = false;
  for (int k = 0; k < n_spins_; ++k) {
    if (!fields_[k].isZero(0.0)) {
      f.add_field(k, fields_[k]);
      has_fields_ = true;
    }
  }
  field_spec_ = std::move(f);
  field_op_.reset();
}

void Generator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  std::fill(out.begin(), out.end(), cplx{});
  for (const auto& t : terms_) t.op->apply_add(t.scale, in, out);
  if (has_fields_) {
    // compiled lazily: pure site-field generators never need it
    if (!field_op_) field_op_.emplace(field_spec_);
    field_op_->apply_add(1.0, in, out);
  }
}

SpectralBounds Generator::bounds() const {
  SpectralBounds b;
  for (const auto& t : terms_) {
    if (t.scale >= 0) {
      b.lo += t.scale * t.bounds.lo;
      b.hi += t.scale * t.bounds.hi;
    } else {
      b.lo += t.scale * t.bounds.hi;
      b.hi += t.scale * t.bounds.lo;
    }
  }
  double f = 0.0;
  for (const auto& h : fields_) f += 0.5 * h.norm();
  b.lo -= f;
  b.hi += f;
  return b;
}

void apply_site_rotations(const std::vector<Eigen::Vector3d>& fields, StateVector& psi) {
  const std::uint64_t half = psi.size() >> 1;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const Eigen::Vector3d& h = fields[k];
    const double angle = h.norm();
    if (angle == 0.0) continue;
    const Eigen::Vector3d n = h / angle;
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    // exp(-i angle n.sigma/2) in the (up, down) basis
    const cplx u00(c, -s * n.z()), u11(c, s * n.z());
    const cplx u01 = cplx(0, -s) * cplx(n.x(), -n.y());
    const cplx u10 = cplx(0, -s) * cplx(n.x(), n.y());
    const std::uint64_t bk = std::uint64_t{1} << k;
    for (std::uint64_t r = 0; r < half; ++r) {
      const std::uint64_t i0 = insert_zero(r, static_cast<int>(k)), i1 = i0 | bk;
      const cplx a = psi[i0], b = psi[i1];
      psi[i0] = u00 * a + u01 * b;
      psi[i1] = u10 * a + u11 * b;
    }
  }
}

int apply_exponential(const Generator& g, StateVector& psi, ExpmWorkspace& ws,
                      const ExpmOptions& opt) {
  if (g.single_site()) {
    apply_site_rotations(g.fields(), psi);
    return 0;
  }
  const SpectralBounds b = g.bounds();
  const double center = 0.5 * (b.lo + b.hi);
  const double radius = 0.5 * (b.hi - b.lo);
  const std::size_t dim = psi.size();
  const cplx global = std::polar(1.0, -center);
  if (radius <= 0.0) {
    for (auto& x : psi) x *= global;
    return 0;
  }

  ws.t0.resize(dim);
  ws.t1.resize(dim);
  ws.t2.resize(dim);
  ws.acc.resize(dim);

  // X v = (G v - center v) / radius has spectrum in [-1, 1].
  auto apply_x = [&](const StateVector& in, StateVector& out) {
    g.apply(in, out);
    const double inv = 1.0 / radius;
    for (std::size_t i = 0; i < dim; ++i) out[i] = (out[i] - center * in[i]) * inv;
  };

  // exp(-i r x) = J0(r) + 2 sum_k (-i)^k J_k(r) T_k(x)
  const int max_terms = static_cast<int>(radius * 1.5) + 200;
  std::copy(psi.begin(), psi.end(), ws.t0.begin());
  const double j0 = std::cyl_bessel_j(0.0, radius);
  for (std::size_t i = 0; i < dim; ++i) ws.acc[i] = j0 * ws.t0[i];
  int applications = 0;
  apply_x(ws.t0, ws.t1);
  ++applications;
  cplx coeff = 2.0 * cplx(0, -1) * std::cyl_bessel_j(1.0, radius);
  for (std::size_t i = 0; i < dim; ++i) ws.acc[i] += coeff * ws.t1[i];

  cplx phase(0, -1);
  for (int k = 2; k < max_terms; ++k) {
    phase *= cplx(0, -1);
    const double jk = std::cyl_bessel_j(static_cast<double>(k), radius);
    // J_k(r) decreases monotonically in k once k > r
    if (k > radius && std::abs(jk) < opt.tolerance) break;
    apply_x(ws.t1, ws.t2);
    ++applications;
    for (std::size_t i = 0; i < dim; ++i) ws.t2[i] = 2.0 * ws.t2[i] - ws.t0[i];
    coeff = 2.0 * phase * jk;
    for (std::size_t i = 0; i < dim; ++i) ws.acc[i] += coeff * ws.t2[i];
    std::swap(ws.t0, ws.t1);
    std::swap(ws.t1, ws.t2);
  }
  for (std::size_t i = 0; i < dim; ++i) psi[i] = global * ws.acc[i];
  return applications;
}

}  // namespace pdtc
