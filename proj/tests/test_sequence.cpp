#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pdtc/sequence.hpp"

using namespace pdtc;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_contiguous(const PulseSchedule& s) {
  double clock = 0.0;
  for (const auto& seg : s.segments) {
    EXPECT_DOUBLE_EQ(seg.t0, clock);
    clock += seg.duration;
  }
  EXPECT_NEAR(clock, s.super_period, 1e-15);
  EXPECT_NEAR(s.duration(), s.cycles * clock, 1e-12);
}

// composite Simpson rule
double simpson(const AcDrive& d, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = d.value(a) + d.value(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * d.value(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(TwoTone, SimulationSettingsLayout) {
  const double tau = 0.025;
  const auto s = build_two_tone(16, tau, 1.5 * tau, 3 * tau, kPi / 2, 0.98 * kPi, 200);
  expect_contiguous(s);
  EXPECT_EQ(s.cycles, 200);
  EXPECT_EQ(s.segments.size(), 2u * 16 + 2);
  int x = 0, y = 0, spin_lock = 0, kicks = 0;
  for (const auto& seg : s.segments) {
    x += seg.kind == SegmentKind::x_pulse;
    y += seg.kind == SegmentKind::y_pulse;
    spin_lock += seg.readout == Readout::spin_lock;
    kicks += seg.readout == Readout::kick;
    if (seg.kind == SegmentKind::x_pulse) {
      EXPECT_EQ(seg.readout, Readout::spin_lock);
      EXPECT_DOUBLE_EQ(seg.angle, kPi / 2);
    }
    if (seg.kind == SegmentKind::y_pulse) {
      EXPECT_EQ(seg.readout, Readout::kick);
      EXPECT_DOUBLE_EQ(seg.angle, 0.98 * kPi);
    }
  }
  EXPECT_EQ(x, 16);
  EXPECT_EQ(y, 1);
  EXPECT_EQ(spin_lock, 16);
  EXPECT_EQ(kicks, 1);
  EXPECT_EQ(s.segments.back().kind, SegmentKind::y_pulse);
  // 44 tau with the free interval between pulses
  EXPECT_NEAR(s.super_period, 44 * tau, 1e-14);
  ASSERT_EQ(s.resonance_frequencies().size(), 1u);
  EXPECT_DOUBLE_EQ(s.resonance_frequencies()[0], 1.0 / (2.0 * s.super_period));
}

TEST(TwoTone, OriginAtFirstYPulseCenter) {
  const auto s = build_two_tone(4, 0.1, 0.05, 0.2, kPi / 2, kPi, 3);
  const auto& y = s.segments.back();
  EXPECT_NEAR(s.origin + y.t0 + 0.5 * y.duration, 0.0, 1e-15);
  EXPECT_NEAR(s.start_time(), s.origin, 0.0);
  EXPECT_NEAR(s.end_time(), s.origin + 3 * s.super_period, 1e-14);
}

TEST(TwoTone, ResonanceIsReportedFromRealizedTiming) {
  // 36 us spacing with N = 16: realized period and resonance follow the schedule, not 330 Hz
  const double tau = 36e-6;
  const auto s = build_two_tone(16, tau, 1e-6, 2e-6, kPi / 2, kPi, 1);
  const double t = 16 * (tau + 1e-6) + tau + 2e-6;
  EXPECT_NEAR(s.block_periods[0], t, 1e-18);
  EXPECT_NEAR(s.resonance_frequencies()[0], 1.0 / (2 * t), 1e-9);
  EXPECT_GT(std::abs(s.resonance_frequencies()[0] - 330.023), 100.0);
}

TEST(TwoTone, ZeroCyclesIsEmpty) {
  const auto s = build_two_tone(16, 0.025, 0.0375, 0.075, kPi / 2, kPi, 0);
  EXPECT_EQ(s.duration(), 0.0);
  EXPECT_EQ(s.start_time(), s.end_time());
}

TEST(TwoTone, RejectsNonPositiveDurations) {
  EXPECT_THROW(build_two_tone(16, 0.0, 0.0375, 0.075, kPi / 2, kPi, 1), std::invalid_argument);
  EXPECT_THROW(build_two_tone(16, 0.025, -1.0, 0.075, kPi / 2, kPi, 1), std::invalid_argument);
  EXPECT_THROW(build_two_tone(16, 0.025, 0.0375, 0.0, kPi / 2, kPi, 1), std::invalid_argument);
  EXPECT_THROW(build_two_tone(16, 0.025, 0.0375, 0.075, kPi / 2, kPi, -1), std::invalid_argument);
}

TEST(TwoTone, BuildersArePure) {
  const auto a = build_two_tone(8, 0.03, 0.01, 0.02, 1.0, 3.0, 5);
  const auto b = build_two_tone(8, 0.03, 0.01, 0.02, 1.0, 3.0, 5);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(SingleTone, KickSpacing) {
  const auto s = build_single_tone(300e-6, 0.0, kPi, 100);
  expect_contiguous(s);
  EXPECT_NEAR(s.super_period, 300e-6, 1e-18);
  EXPECT_EQ(s.kicks_per_cycle(), 1);
  EXPECT_EQ(s.segments.back().kind, SegmentKind::y_pulse);
  EXPECT_EQ(s.segments.back().duration, 0.0);
  EXPECT_THROW(build_single_tone(1.0, 1.0, kPi, 1), std::invalid_argument);
  EXPECT_THROW(build_single_tone(1.0, -0.1, kPi, 1), std::invalid_argument);
}

TEST(ThreeTone, TwoRealizedResonances) {
  const double tau = 0.025, tx = 0.0375, ty = 0.075;
  const auto s = build_three_tone(4, 8, tau, tx, ty, kPi / 2, kPi, 10);
  expect_contiguous(s);
  EXPECT_EQ(s.kicks_per_cycle(), 2);
  const auto f = s.resonance_frequencies();
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NEAR(f[0], 1.0 / (2 * (4 * (tau + tx) + tau + ty)), 1e-12);
  EXPECT_NEAR(f[1], 1.0 / (2 * (8 * (tau + tx) + tau + ty)), 1e-12);
  EXPECT_NEAR(s.super_period, s.block_periods[0] + s.block_periods[1], 1e-14);
}

TEST(ThreeTone, EqualBlocksRejected) {
  EXPECT_THROW(build_three_tone(6, 6, 0.025, 0.0375, 0.075, kPi / 2, kPi, 1),
               std::invalid_argument);
}

TEST(SpinLock, OnlyXPulses) {
  const auto s = build_spin_lock(0.025, 0.0375, kPi / 2, 50);
  EXPECT_EQ(s.kicks_per_cycle(), 0);
  for (const auto& seg : s.segments) EXPECT_NE(seg.kind, SegmentKind::y_pulse);
}

TEST(AcIntegral, ZeroAmplitude) {
  EXPECT_EQ(ac_integral({0.0, 3.0, 0.4}, 0.1, 2.0), 0.0);
}

TEST(AcIntegral, StaticLimit) {
  const AcDrive d{0.8, 1e-12, kPi / 2};
  EXPECT_NEAR(ac_integral(d, 0.3, 1.7), 0.8 * 1.4, 1e-12);
}

TEST(AcIntegral, FullPeriodVanishes) {
  const AcDrive d{1.3, 2.5, 0.7};
  for (double t0 : {0.0, 0.11, 3.7}) {
    EXPECT_LT(std::abs(ac_integral(d, t0, t0 + 1.0 / d.frequency)), 1e-14 * d.amplitude / d.frequency);
  }
}

TEST(AcIntegral, MatchesQuadrature) {
  const AcDrive d{0.9, 0.45, 1.1};
  for (auto [a, b] : {std::pair{-1.0, -0.9}, {0.0, 2.5}, {3.0, 3.075}}) {
    EXPECT_NEAR(ac_integral(d, a, b), simpson(d, a, b), 1e-12);
  }
}

TEST(AcIntegral, IsAdditive) {
  const AcDrive d{0.7, 0.4545, kPi / 2};
  const double ab = ac_integral(d, -1.0, 0.3), bc = ac_integral(d, 0.3, 2.2);
  const double ac = ac_integral(d, -1.0, 2.2);
  EXPECT_LE(std::abs(ab + bc - ac), 1e-14 * (std::abs(ab) + std::abs(bc) + std::abs(ac)));
}

TEST(AcIntegral, RejectsReversedWindow) {
  EXPECT_THROW(ac_integral({1.0, 1.0, 0.0}, 1.0, 0.5), std::invalid_argument);
}

TEST(Disorder, ZeroStrengthIsZero) {
  const auto d = sample_disorder(0.0, 15, 3);
  EXPECT_TRUE(d.empty());
  for (auto* v : {&d.chi, &d.eta, &d.zeta}) {
    ASSERT_EQ(v->size(), 15u);
    for (double x : *v) EXPECT_EQ(x, 0.0);
  }
}

TEST(Disorder, SeedsDifferAndStayInBounds) {
  const auto a = sample_disorder(1.0, 15, 1);
  const auto b = sample_disorder(1.0, 15, 2);
  EXPECT_NE(a.chi, b.chi);
  for (const auto* d : {&a, &b}) {
    for (auto* v : {&d->chi, &d->eta, &d->zeta}) {
      for (double x : *v) {
        EXPECT_GE(x, -0.5);
        EXPECT_LE(x, 0.5);
      }
    }
  }
  EXPECT_EQ(sample_disorder(1.0, 15, 1).zeta, a.zeta);
}

TEST(Disorder, EmpiricalMoments) {
  const double sigma = 2.0;
  const int n = 10000;
  const auto d = sample_disorder(sigma, n, 99);
  for (auto* v : {&d.chi, &d.eta, &d.zeta}) {
    double m = 0, m2 = 0;
    for (double x : *v) {
      m += x;
      m2 += x * x;
    }
    m /= n;
    m2 /= n;
    EXPECT_LT(std::abs(m), 3 * sigma / std::sqrt(12.0 * n));
    EXPECT_NEAR(m2, sigma * sigma / 12.0, 0.05 * sigma * sigma / 12.0);
  }
  EXPECT_THROW(sample_disorder(-1.0, 3, 1), std::invalid_argument);
}

TEST(ScheduleJson, RoundTripAndHash) {
  const auto s = build_three_tone(3, 5, 0.02, 0.03, 0.06, kPi / 2, 0.97 * kPi, 7);
  const auto r = schedule_from_json(nlohmann::json::parse(to_json(s).dump()));
  EXPECT_EQ(to_json(r).dump(), to_json(s).dump());
  ASSERT_EQ(r.segments.size(), s.segments.size());
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    EXPECT_EQ(r.segments[i].t0, s.segments[i].t0);
    EXPECT_EQ(r.segments[i].kind, s.segments[i].kind);
    EXPECT_EQ(r.segments[i].readout, s.segments[i].readout);
  }
  const AcDrive drive{0.3, s.resonance_frequencies()[0], kPi / 2};
  const auto d = sample_disorder(0.5, 4, 11);
  const auto h = schedule_hash(s, drive, d);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h, schedule_hash(r, drive_from_json(to_json(drive)), d));
  EXPECT_NE(h, schedule_hash(s, AcDrive{0.31, drive.frequency, drive.phase}, d));
  EXPECT_NE(h, schedule_hash(s, drive, sample_disorder(0.5, 4, 12)));
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
