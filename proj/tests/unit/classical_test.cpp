#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dslab/classical.hpp"

using namespace dslab;

namespace {

MetricSpec bump(double amplitude, double width = 1.0) {
  MetricSpec m;
  m.kind = MetricKind::conformal_bump;
  m.amplitude = amplitude;
  m.width = width;
  return m;
}

PhaseSpacePoint point(std::vector<double> x, std::vector<double> xi) { return {std::move(x), std::move(xi)}; }

double distance(const PhaseSpacePoint& a, const PhaseSpacePoint& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.x.size(); ++k) {
    s = std::max({s, std::abs(a.x[k] - b.x[k]), std::abs(a.xi[k] - b.xi[k])});
  }
  return s;
}

double max_radius(const Trajectory& tr) {
  double r = 0.0;
  for (const auto& s : tr.points) r = std::max(r, std::hypot(s.w.x[0], s.w.x[1]));
  return r;
}

}  // namespace

TEST(Flow, FlatMetricIsStraightLine) {
  const auto w0 = point({0.3, -1.0, 2.0}, {0.7, 0.2, -0.4});
  FlowOptions o;
  o.dt = 0.05;
  const auto tr = flow(MetricSpec{}, w0, 10.0, o);
  ASSERT_EQ(tr.classification, FlowClass::trapped_up_to_T);
  EXPECT_EQ(tr.halvings, 0);
  for (const auto& s : tr.points) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(s.w.x[k], w0.x[k] + 2.0 * s.t * w0.xi[k], 1e-9);
      EXPECT_NEAR(s.w.xi[k], w0.xi[k], 1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(tr.points.front().t, -10.0);
  EXPECT_DOUBLE_EQ(tr.points.back().t, 10.0);
}

TEST(Flow, BumpMetricConservesEnergy) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double amp : {0.3, 1.0}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto w0 = on_energy_shell(bump(amp), point({u(rng), u(rng)}, {u(rng), u(rng)}));
      const auto tr = flow(bump(amp), w0, 50.0);
      ASSERT_NE(tr.classification, FlowClass::integrator_failure);
      EXPECT_LE(tr.max_energy_drift, 1e-6);
      for (const auto& s : tr.points) EXPECT_LE(std::abs(s.p - 1.0), 1e-6);
    }
  }
}

TEST(Flow, TimeReversible) {
  const auto m = bump(0.8);
  const auto w0 = point({0.5, 0.2}, {0.3, -0.9});
  const auto w1 = flow_to(m, w0, 7.0, 0.01);
  const auto back = flow_to(m, w1, -7.0, 0.01);
  EXPECT_LT(distance(back, w0), 1e-8);
}

TEST(Flow, MomentumScalingReparametrizesTime) {
  for (const auto& m : {MetricSpec{}, bump(0.5)}) {
    const auto w0 = point({-1.0, 0.4}, {0.6, 0.1});
    auto w2 = w0;
    for (double& v : w2.xi) v *= 2.0;
    for (double t : {0.5, 1.5, 3.0}) {
      const auto a = flow_to(m, w0, 2.0 * t, 0.002);
      const auto b = flow_to(m, w2, t, 0.001);
      for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(a.x[k], b.x[k], 1e-6);
        EXPECT_NEAR(2.0 * a.xi[k], b.xi[k], 1e-6);
      }
    }
  }
}

TEST(Flow, RejectsDegenerateInput) {
  EXPECT_THROW(flow(MetricSpec{}, point({0.0}, {0.0}), 1.0), std::invalid_argument);
  EXPECT_THROW(flow(MetricSpec{}, point({0.0}, {1.0}), 0.0), std::invalid_argument);
  EXPECT_THROW(flow(MetricSpec{}, point({0.0, 1.0}, {1.0}), 1.0), std::invalid_argument);
  EXPECT_THROW(flow(MetricSpec{}, point({NAN}, {1.0}), 1.0), std::invalid_argument);
}

TEST(Flow, GateFailureAfterHalvingsIsReported) {
  FlowOptions o;
  o.dt = 0.5;
  o.conservation_tol = 1e-14;
  o.max_halvings = 1;
  const auto tr = flow(bump(2.0), point({0.5, 0.0}, {0.0, 1.0}), 5.0, o);
  EXPECT_EQ(tr.classification, FlowClass::integrator_failure);
  EXPECT_EQ(tr.halvings, 1);
}

TEST(TrappingMetric, RingsAreCircularGeodesics) {
  const auto m = trapping_metric();
  const double r1 = trapping_ring_radius(m, true);
  const double r2 = trapping_ring_radius(m, false);
  EXPECT_LT(r1, r2);
  // Be^{-s}(s - 1) = 1 at s = r^2
  for (double r : {r1, r2}) EXPECT_NEAR(10.0 * std::exp(-r * r) * (r * r - 1.0), 1.0, 1e-12);
  EXPECT_THROW(trapping_ring_radius(trapping_metric(5.0)), std::invalid_argument);
  EXPECT_THROW(trapping_ring_radius(bump(1.0)), std::invalid_argument);
}

TEST(TrappingMetric, StableRingStaysBoundedForLongTimes) {
  const auto m = trapping_metric();
  const auto w0 = ring_launch(m, 2);
  const auto tr = flow(m, w0, 200.0);
  ASSERT_EQ(tr.classification, FlowClass::trapped_up_to_T);
  const double r1 = trapping_ring_radius(m);
  EXPECT_LT(max_radius(tr), r1 + 0.05);
  // tightened step as the oracle
  FlowOptions fine;
  fine.dt = tr.dt / 4;
  fine.backward = false;
  const auto tf = flow(m, w0, 200.0, fine);
  EXPECT_LT(std::abs(max_radius(tf) - max_radius(tr)), 1e-3);
}

TEST(Classify, FlatMetricAlwaysEscapes) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto w = point({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
    EXPECT_EQ(classify_trapped(MetricSpec{}, w, 50.0, 5.0), FlowClass::escaped);
  }
}

TEST(Classify, TrappingRingIsTrappedAndRadialLaunchEscapes) {
  const auto m = trapping_metric();
  EXPECT_EQ(classify_trapped(m, ring_launch(m, 2), 200.0, 6.0), FlowClass::trapped_up_to_T);
  EXPECT_EQ(classify_trapped(bump(1.0), point({5.0, 0.0}, {1.0, 0.0}), 50.0, 6.0), FlowClass::escaped);
  EXPECT_EQ(classify_trapped(m, point({3.0, 0.0}, {1.0, 0.2}), 50.0, 6.0), FlowClass::escaped);
}

TEST(Gcc, FlatMetricIsVacuous) {
  DampingSpec a;
  a.kind = DampingKind::gaussian;
  a.amplitude = 1.0;
  const std::vector<PhaseSpacePoint> sample = {point({0.0, 0.0}, {1.0, 0.0}), point({1.0, 1.0}, {0.0, 2.0})};
  const auto rep = check_damping_condition(MetricSpec{}, a, sample, 50.0, 0.01);
  EXPECT_EQ(rep.verdict, GccStatus::satisfied);
  EXPECT_EQ(rep.trapped, 0);
  EXPECT_EQ(rep.message, "GCC vacuously satisfied (no trapped samples)");
}

TEST(Gcc, RingSupportSatisfiesFarSupportViolates) {
  const auto m = trapping_metric();
  const double r1 = trapping_ring_radius(m);
  std::vector<PhaseSpacePoint> sample;
  for (double th : {0.0, 1.0, 2.5}) {
    sample.push_back(point({r1 * std::cos(th), r1 * std::sin(th)}, {-std::sin(th), std::cos(th)}));
  }
  sample.push_back(point({0.9 * r1, 0.0}, {0.05, 1.0}));
  sample.push_back(point({4.0, 0.0}, {1.0, 0.0}));  // escapes

  DampingSpec on_ring;
  on_ring.kind = DampingKind::annulus;
  on_ring.amplitude = 1.0;
  on_ring.radius = r1;
  on_ring.width = 0.3;
  GccOptions o;
  o.threads = 2;
  const auto sat = check_damping_condition(m, on_ring, sample, 200.0, 0.1, o);
  EXPECT_EQ(sat.trapped, 4);
  EXPECT_EQ(sat.satisfied, 4);
  EXPECT_EQ(sat.status[4], GccStatus::not_trapped);
  EXPECT_EQ(sat.verdict, GccStatus::satisfied);
  EXPECT_NE(sat.message.find("finite-time surrogate"), std::string::npos);

  DampingSpec far;
  far.kind = DampingKind::gaussian;
  far.amplitude = 1.0;
  far.width = 0.5;
  far.center = {5.0, 0.0};
  const auto vio = check_damping_condition(m, far, sample, 200.0, 0.1, o);
  EXPECT_EQ(vio.violated, 4);
  EXPECT_EQ(vio.verdict, GccStatus::violated);
}

TEST(EscapeProbe, FlatBracketIsTwoOnUnitShell) {
  const auto rep = escape_symbol_probe(MetricSpec{}, DampingSpec{}, nullptr, 0.0, {1.0, 1.0}, 500, 3);
  EXPECT_NEAR(rep.minimum, 2.0, 1e-9);
  EXPECT_NEAR(rep.c0, 2.0 / 3.0, 1e-9);
  EXPECT_TRUE(rep.positive);
}

TEST(EscapeProbe, SmallBumpStaysNearTwo) {
  const auto rep = escape_symbol_probe(bump(0.01), DampingSpec{}, nullptr, 0.0, {1.0, 1.0}, 2000, 2);
  EXPECT_NEAR(rep.minimum, 2.0, 0.2);
  EXPECT_TRUE(rep.positive);
}

TEST(EscapeProbe, TrappingMetricFlagsNonPositiveBracket) {
  const auto rep = escape_symbol_probe(trapping_metric(), DampingSpec{}, nullptr, 0.0, {1.0, 1.0}, 2000, 2);
  EXPECT_LE(rep.minimum, 0.0);
  EXPECT_FALSE(rep.positive);
  const double r = std::hypot(rep.argmin.x[0], rep.argmin.x[1]);
  EXPECT_GT(r, trapping_ring_radius(trapping_metric(), true) - 1e-9);
  EXPECT_LT(r, trapping_ring_radius(trapping_metric(), false) + 1e-9);
}

TEST(EscapeProbe, DampingTermAndCorrectionEnterTheMinimum) {
  DampingSpec a;
  a.kind = DampingKind::gaussian;
  a.amplitude = 1.0;
  a.width = 100.0;  // essentially 1 on the sample ball
  a.alpha = 1.0;
  const auto with = escape_symbol_probe(MetricSpec{}, a, nullptr, 1.0, {1.0, 1.0}, 200, 2);
  EXPECT_NEAR(with.minimum, 3.0, 2e-3);  // a^2 >= exp(-2 * 9 / 1e4) on the ball
  EXPECT_TRUE(with.chi_audit_ok);
  // f_c = x.xi doubles the flat bracket
  const PhaseSymbol f = [](const PhaseSpacePoint& w) { return w.x[0] * w.xi[0] + w.x[1] * w.xi[1]; };
  const auto doubled = escape_symbol_probe(MetricSpec{}, DampingSpec{}, f, 0.0, {1.0, 1.0}, 200, 2);
  EXPECT_NEAR(doubled.minimum, 4.0, 1e-6);
}

TEST(EscapeProbe, ChiStaysBelowPowerEnvelope) {
  for (double alpha : {0.0, 0.5, 1.0, 1.9}) {
    for (double r = 0.0; r < 5.0; r += 0.01) EXPECT_LE(chi_alpha(r, alpha), std::pow(r, alpha / 2) + 1e-15);
  }
  EXPECT_NEAR(chi_alpha(1.0, 1.0), 1.0, 1e-15);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  FlowOptions o;
  o.dt = 0.5;
  o.backward = false;
  const auto tr = flow(MetricSpec{}, point({0.0, 0.0}, {1.0, 0.0}), 1.0, o);
  std::ostringstream s;
  write_trajectory_csv(s, tr);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "t,x_1,x_2,xi_1,xi_2,p");
  EXPECT_NE(s.str().find("\n1,2,0,1,0,1\n"), std::string::npos);
}
