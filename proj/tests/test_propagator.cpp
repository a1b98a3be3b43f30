#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pdtc/analysis.hpp"
#include "pdtc/lattice.hpp"
#include "pdtc/operators.hpp"
#include "pdtc/propagator.hpp"

using namespace pdtc;
using oracle::Mat;

namespace {

constexpr double kPi = std::numbers::pi;

SpinGraph graph(int n, std::uint64_t seed) {
  return normalize_median(orient_graph(sample_graph(n, 0.9, 1.1, seed)));
}

SpinGraph free_spins(int n) {
  std::vector<Vec3> pos;
  for (int k = 0; k < n; ++k) pos.emplace_back(k, 0, 0);
  return make_graph(pos, Vec3::UnitZ(), 0.0);
}

double max_sample_gap(const TimeTrace& a, const TimeTrace& b) {
  EXPECT_EQ(a.size(), b.size());
  double gap = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    EXPECT_EQ(a.parity[i], b.parity[i]);
    EXPECT_EQ(a.kind[i], b.kind[i]);
    gap = std::max({gap, std::abs(a.time[i] - b.time[i]), std::abs(a.ix[i] - b.ix[i]),
                    std::abs(a.iy[i] - b.iy[i]), std::abs(a.iz[i] - b.iz[i])});
  }
  return gap;
}

Eigen::Matrix2cd rot2(double hx, double hy, double hz) {
  const Mat h = hx * oracle::site(1, 0, 0) + hy * oracle::site(1, 0, 1) + hz * oracle::site(1, 0, 2);
  return oracle::expm_herm(h, 1.0);
}

}  // namespace

TEST(InitialState, ZPolarized) {
  const OperatorSet ops(3);
  const auto st = initial_state(ops, Axis::z);
  const auto e = collective_expectations(st.psi, 3);
  EXPECT_DOUBLE_EQ(e.z(), 1.5);
  EXPECT_NEAR(e.x(), 0.0, 1e-15);
  EXPECT_NEAR(e.y(), 0.0, 1e-15);
}

TEST(InitialState, XPolarizedEqualsRotatedUpState) {
  const OperatorSet ops(2);
  const auto st = initial_state(ops, Axis::x, 0.7);
  EXPECT_EQ(st.time, 0.7);
  const auto e = collective_expectations(st.psi, 2);
  EXPECT_NEAR(e.x() / 1.0, 1.0, 1e-15);
  EXPECT_NEAR(e.z(), 0.0, 1e-15);
  Eigen::VectorXcd up = Eigen::VectorXcd::Zero(4);
  up(0) = 1.0;
  const Eigen::VectorXcd ref = oracle::expm_herm(oracle::collective(2, 1), kPi / 2) * up;
  EXPECT_NEAR(std::abs(ref.dot(oracle::to_vec(st.psi))), 1.0, 1e-15);
  EXPECT_THROW(initial_state(ops, Axis::y), std::invalid_argument);
}

TEST(Segment, FreeEvolutionKeepsIzEigenstate) {
  const auto g = graph(5, 1);
  const OperatorSet ops(5);
  const auto hdd = build_hdd(g, ops);
  Propagator p(hdd, {}, no_disorder(5));
  auto st = initial_state(ops, Axis::z, 0.0);
  p.apply_segment(st, {SegmentKind::free, 0.8, 0.0, 0.0, Readout::none}, 0.0);
  EXPECT_NEAR(collective_expectations(st.psi, 5).z(), 2.5, 1e-12);
  EXPECT_DOUBLE_EQ(st.time, 0.8);
}

TEST(Segment, InstantPiPulseFlipsXAndZ) {
  const OperatorSet ops(3);
  const auto hdd = build_hdd(free_spins(3), ops);
  Propagator p(hdd, {}, no_disorder(3));
  const Segment y{SegmentKind::y_pulse, 0.0, kPi, 0.0, Readout::kick};
  for (Axis a : {Axis::x, Axis::z}) {
    auto st = initial_state(ops, a);
    p.apply_segment(st, y, 0.0);
    const auto e = collective_expectations(st.psi, 3);
    EXPECT_NEAR(e[static_cast<int>(a)], -1.5, 1e-14);
  }
}

TEST(Segment, ClockMismatchIsAnError) {
  const OperatorSet ops(2);
  const auto hdd = build_hdd(free_spins(2), ops);
  Propagator p(hdd, {}, no_disorder(2));
  auto st = initial_state(ops, Axis::x, 0.0);
  EXPECT_THROW(p.apply_segment(st, {SegmentKind::free, 0.1, 0.0, 0.0, Readout::none}, 0.5),
               PropagationError);
}

TEST(Segment, NormDriftIsReportedNotRepaired) {
  const auto g = graph(4, 2);
  const OperatorSet ops(4);
  const auto hdd = build_hdd(g, ops);
  PropagatorOptions opt;
  opt.norm_tolerance = -1.0;  // any rounding counts as drift
  Propagator p(hdd, {}, no_disorder(4), opt);
  auto st = initial_state(ops, Axis::x);
  EXPECT_THROW(p.apply_segment(st, {SegmentKind::free, 0.3, 0.0, 0.0, Readout::none}, 0.0),
               PropagationError);
}

TEST(Segment, GeneratorMatchesDefinition) {
  const auto g = graph(3, 4);
  const OperatorSet ops(3);
  const auto d = sample_disorder(0.6, 3, 5);
  const auto hdd = build_hdd(g, ops, std::span<const double>(d.zeta));
  const AcDrive drive{0.4, 0.7, 0.3};
  Propagator p(hdd, drive, d);
  const Segment x{SegmentKind::x_pulse, 0.05, kPi / 2, 0.0, Readout::spin_lock};
  const double t0 = 0.21;
  const double theta = ac_integral(drive, t0, t0 + 0.05);
  Mat ref = 0.05 * oracle::dipolar(g.couplings, 2);
  for (int k = 0; k < 3; ++k) {
    ref += 0.05 * d.zeta[k] * oracle::site(3, k, 2);
    ref += (kPi / 2 + 0.05 * d.chi[k]) * oracle::site(3, k, 0) + theta * oracle::site(3, k, 2);
  }
  EXPECT_LT((dense::to_dense(p.segment_generator(x, t0)) - ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Factorization, DistanceScalesQuadratically) {
  std::vector<double> alphas, dist;
  for (double a = 0.01; a <= 0.3 + 1e-12; a *= std::pow(30.0, 1.0 / 9.0)) {
    const Eigen::Matrix2cd exact = rot2(0.0, kPi, a);
    alphas.push_back(a);
    dist.push_back(oracle::spectral_norm(exact - factorized_y_pulse(kPi, a)));
  }
  const auto fit = loglog_fit(alphas, dist);
  EXPECT_NEAR(fit.slope, 2.0, 0.1);
}

TEST(Factorization, PiPulseFormHasPositiveXCorrection) {
  const double a = 0.05;
  const Eigen::Matrix2cd ref = rot2(0.0, kPi, 0.0) * rot2(-2 * a / kPi, 0.0, 0.0);
  EXPECT_LT((factorized_y_pulse(kPi, a) - ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SingleParticle, ResonantCancellation) {
  const int n = 16;
  const double tau = 0.025;
  const double period = (n + 1) * tau;
  const AcDrive drive{1.0 / kPi, 1.0 / (2 * period), kPi / 2};
  EXPECT_LT(single_particle_residual(n, kPi / 2, kPi, tau, 0.0, drive), 1e-10);
  EXPECT_LT(single_particle_residual(n, kPi / 2, kPi, tau, 0.0, AcDrive{}), 1e-10);
}

TEST(SingleParticle, MatchesExplicitProduct) {
  const int n = 3;
  const double tau = 0.1, ty = 0.05;
  const double period = (n + 1) * tau + ty;
  const AcDrive drive{0.8, 0.37, 0.4};
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  double t = -(period - ty / 2);
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i <= n; ++i) {
      u = rot2(0, 0, ac_integral(drive, t, t + tau)) * u;
      t += tau;
      if (i < n) u = rot2(kPi / 2, 0, 0) * u;
    }
    u = rot2(0, kPi, ac_integral(drive, t, t + ty)) * u;
    t += ty;
  }
  EXPECT_LT((single_particle_two_period(n, kPi / 2, kPi, tau, ty, drive) - u).cwiseAbs().maxCoeff(),
            1e-13);
}

TEST(SingleParticle, FinitePulseResidualIsLinearInFieldArea) {
  const int n = 16;
  const double tau = 0.025;
  auto residual = [&](double b, double ty) {
    const double period = (n + 1) * tau + ty;
    return single_particle_residual(n, kPi / 2, kPi, tau, ty, {b, 1.0 / (2 * period), kPi / 2});
  };
  std::vector<double> bs, rb, tys, rt;
  for (double b : {0.001, 0.003, 0.01, 0.03}) {
    bs.push_back(b);
    rb.push_back(residual(b, 0.075));
  }
  for (double ty : {0.01, 0.02, 0.04, 0.08}) {
    tys.push_back(ty);
    rt.push_back(residual(0.01, ty));
  }
  EXPECT_NEAR(loglog_fit(bs, rb).slope, 1.0, 0.05);
  EXPECT_NEAR(loglog_fit(tys, rt).slope, 1.0, 0.1);
}

TEST(Evolve, SingleToneExactPiToggles) {
  const int n = 8;
  const OperatorSet ops(n);
  const auto hdd = build_hdd(graph(n, 3), ops);
  const auto s = build_single_tone(0.3, 0.0, kPi, 60);
  const auto tr = simulate(hdd, ops, s, {}, no_disorder(n), Axis::z);
  ASSERT_EQ(tr.size(), 61u);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(tr.parity[i], static_cast<int>(i));
    EXPECT_NEAR(tr.iz[i], i % 2 ? -1.0 : 1.0, 1e-10);
  }
}

TEST(Evolve, TraceLayoutAndInvariants) {
  const int n = 5;
  const OperatorSet ops(n);
  const auto hdd = build_hdd(graph(n, 4), ops);
  const auto s = build_two_tone(4, 0.05, 0.03, 0.06, kPi / 2, 0.95 * kPi, 5);
  const AcDrive drive{0.5, s.resonance_frequencies()[0], kPi / 2};
  const auto tr = simulate(hdd, ops, s, drive, no_disorder(n), Axis::x);
  ASSERT_EQ(tr.size(), 1u + 5 * 5);
  EXPECT_EQ(tr.kind.front(), Readout::none);
  EXPECT_NEAR(tr.time.front(), s.start_time(), 1e-15);
  EXPECT_NEAR(tr.time.back(), s.end_time(), 1e-12);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_LE(tr.s[i], 1.0 + 1e-9);
    EXPECT_GT(tr.phi[i], -kPi);
    EXPECT_LE(tr.phi[i], kPi);
    EXPECT_NEAR(tr.s[i], std::hypot(tr.ix[i], tr.iy[i]), 1e-15);
  }
  EXPECT_EQ(tr.parity.back(), 5);
}

TEST(Evolve, MatchesIndependentDensePropagation) {
  const int n = 4;
  const auto g = graph(n, 5);
  const OperatorSet ops(n);
  const auto d = sample_disorder(0.8, n, 6);
  const auto hdd = build_hdd(g, ops, std::span<const double>(d.zeta));
  const auto s = build_two_tone(3, 0.05, 0.04, 0.08, kPi / 2, 0.97 * kPi, 3);
  const AcDrive drive{0.6, 0.9 * s.resonance_frequencies()[0], 1.1};
  const auto tr = simulate(hdd, ops, s, drive, d, Axis::x);

  Mat hz = oracle::dipolar(g.couplings, 2);
  for (int k = 0; k < n; ++k) hz += d.zeta[k] * oracle::site(n, k, 2);
  Eigen::VectorXcd psi = oracle::to_vec(initial_state(ops, Axis::x).psi);
  std::vector<Eigen::Vector3d> ref;
  auto observe = [&] {
    Eigen::Vector3d e;
    for (int a = 0; a < 3; ++a) e(a) = psi.dot(oracle::collective(n, a) * psi).real() / (n / 2.0);
    ref.push_back(e);
  };
  observe();
  double t = s.origin;
  for (int m = 0; m < s.cycles; ++m) {
    for (const auto& seg : s.segments) {
      Mat gen = seg.duration * hz;
      const double theta = ac_integral(drive, t, t + seg.duration);
      for (int k = 0; k < n; ++k) {
        gen += theta * oracle::site(n, k, 2);
        if (seg.kind == SegmentKind::x_pulse)
          gen += (seg.angle + seg.duration * d.chi[k]) * oracle::site(n, k, 0);
        if (seg.kind == SegmentKind::y_pulse)
          gen += (seg.angle + seg.duration * d.eta[k]) * oracle::site(n, k, 1);
      }
      psi = oracle::expm_herm(gen, 1.0) * psi;
      t += seg.duration;
      if (seg.readout != Readout::none) observe();
    }
  }
  ASSERT_EQ(ref.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(tr.ix[i], ref[i].x(), 1e-10);
    EXPECT_NEAR(tr.iy[i], ref[i].y(), 1e-10);
    EXPECT_NEAR(tr.iz[i], ref[i].z(), 1e-10);
  }
}

TEST(Evolve, DenseAndMatrixFreeEnginesAgree) {
  const int n = 6;
  for (std::uint64_t seed : {1u, 2u}) {
    const auto g = graph(n, 40 + seed);
    const OperatorSet ops(n);
    const auto d = sample_disorder(1.0, n, seed);
    const auto hdd = build_hdd(g, ops, std::span<const double>(d.zeta));
    for (const auto& s : {build_two_tone(16, 0.025, 0.0375, 0.075, kPi / 2, 0.98 * kPi, 4),
                          build_three_tone(2, 5, 0.03, 0.02, 0.05, kPi / 2, kPi, 3)}) {
      const AcDrive drive{1.0 / kPi, s.resonance_frequencies()[0], kPi / 2};
      PropagatorOptions dense_opt;
      dense_opt.engine = Engine::dense;
      const auto a = simulate(hdd, ops, s, drive, d, Axis::x);
      const auto b = simulate(hdd, ops, s, drive, d, Axis::x, dense_opt);
      EXPECT_LT(max_sample_gap(a, b), 1e-8);
    }
  }
}

TEST(Evolve, DenseCacheReusesResonantGenerators) {
  const int n = 4;
  const OperatorSet ops(n);
  const auto hdd = build_hdd(graph(n, 7), ops);
  const auto s = build_two_tone(3, 0.05, 0.04, 0.08, kPi / 2, kPi, 20);
  PropagatorOptions opt;
  opt.engine = Engine::dense;
  Propagator p(hdd, {}, no_disorder(n), opt);
  auto st = initial_state(ops, Axis::x, s.start_time());
  p.evolve(st, s);
  // no AC: one entry per distinct (kind, width)
  EXPECT_EQ(p.dense_cache_size(), 3u);
}

TEST(Evolve, TimeReversalReturnsInitialState) {
  const int n = 6;
  const OperatorSet ops(n);
  const auto d = sample_disorder(0.5, n, 3);
  const auto hdd = build_hdd(graph(n, 8), ops, std::span<const double>(d.zeta));
  const auto s = build_two_tone(16, 0.025, 0.0375, 0.075, kPi / 2, 0.98 * kPi, 10);
  const AcDrive drive{1.0 / kPi, s.resonance_frequencies()[0], kPi / 2};
  for (Engine e : {Engine::matrix_free, Engine::dense}) {
    PropagatorOptions opt;
    opt.engine = e;
    Propagator p(hdd, drive, d, opt);
    const auto psi0 = initial_state(ops, Axis::x, s.start_time());
    auto st = psi0;
    p.evolve(st, s);
    EXPECT_NEAR(st.time, s.end_time(), 1e-9);
    p.evolve_inverse(st, s);
    EXPECT_GT(std::abs(inner(psi0.psi, st.psi)), 1.0 - 1e-8);
  }
}

TEST(Evolve, NormPreservedOverManySegments) {
  const int n = 4;
  const OperatorSet ops(n);
  const auto hdd = build_hdd(graph(n, 9), ops);
  const auto s = build_spin_lock(0.025, 0.0375, kPi / 2, 50000);
  const AcDrive drive{0.3, 2.0, 0.1};
  Propagator p(hdd, drive, no_disorder(n));
  auto st = initial_state(ops, Axis::x, s.start_time());
  p.evolve(st, s);  // 10^5 segments, each norm-checked
  EXPECT_NEAR(norm(st.psi), 1.0, 1e-9);
}

TEST(Evolve, SubstepsConvergeToQuasiStatic) {
  const int n = 5;
  const OperatorSet ops(n);
  const auto hdd = build_hdd(graph(n, 10), ops);
  const auto s = build_two_tone(16, 0.025, 0.0375, 0.075, kPi / 2, 0.98 * kPi, 4);
  const AcDrive drive{1.0 / kPi, s.resonance_frequencies()[0], kPi / 2};
  PropagatorOptions fine;
  fine.substeps = 100;
  const auto a = simulate(hdd, ops, s, drive, no_disorder(n), Axis::x);
  const auto b = simulate(hdd, ops, s, drive, no_disorder(n), Axis::x, fine);
  // f_AC tau_y ~ 0.03: the quasi-static form is close to the time-ordered one
  EXPECT_LT(max_sample_gap(a, b), 1e-2);
  fine.substeps = 1;
  EXPECT_EQ(max_sample_gap(a, simulate(hdd, ops, s, drive, no_disorder(n), Axis::x, fine)), 0.0);
}

TEST(Propagator, RejectsMismatchedDisorder) {
  const OperatorSet ops(4);
  const auto hdd = build_hdd(graph(4, 11), ops);
  EXPECT_THROW(Propagator(hdd, {}, no_disorder(5)), std::invalid_argument);
  // z offsets must be part of H_dd
  EXPECT_THROW(Propagator(hdd, {}, sample_disorder(1.0, 4, 1)), std::invalid_argument);
}

// <H_SL + B_eff I^x> every 2T over the first third of each trajectory's T2'.
TEST(Evolve, EnergyQuasiConservedOverPrethermalWindow) {
  const int n = 8;
  const auto s = build_two_tone(16, 0.025, 0.0375, 0.075, kPi / 2, 0.98 * kPi, 12);
  const AcDrive drive{1.0 / kPi, s.resonance_frequencies()[0], kPi / 2};
  const double b_eff = effective_field(drive, 0.075, 0.98 * kPi);
  const OperatorSet ops(n);
  const auto dis = sample_disorder(0.0, n, 0);
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto g = graph(n, seed);
    const auto hdd = build_hdd(g, ops);
    const auto hsl = build_hsl(g, ops);
    const auto trace = simulate(hdd, ops, s, drive, dis, Axis::x, {});
    const double window = lifetime_1e(trace, Axis::x, s.super_period).lifetime / 3.0;
    Propagator prop(hdd, drive, dis);
    auto st = initial_state(ops, Axis::x, s.start_time());
    auto energy = [&] {
      return hsl.compiled.expectation(st.psi) + b_eff * collective_expectations(st.psi, n).x();
    };
    const double e0 = energy();
    for (int m = 0; (m + 2) * s.super_period <= window; m += 2) {
      for (int c = m; c < m + 2; ++c) {
        for (const auto& seg : s.segments) {
          prop.apply_segment(st, seg, s.origin + c * s.super_period + seg.t0);
        }
      }
      ++checked;
      EXPECT_LT(std::abs(energy() - e0), 0.1 * std::abs(e0)) << "graph " << seed << " at 2T x "
                                                            << (m / 2 + 1);
    }
  }
  EXPECT_GT(checked, 0);
}
