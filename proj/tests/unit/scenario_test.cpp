#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dslab/scenario.hpp"

using namespace dslab;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "test");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, DefaultsAreFreeThreeDimensional) {
  const Scenario s = parse("");
  EXPECT_EQ(s.dim, 3);
  EXPECT_EQ(s.n, 64);
  EXPECT_EQ(s.metric.kind, MetricKind::identity);
  EXPECT_EQ(s.damping.kind, DampingKind::none);
}

TEST(Scenario, ParsesTypedValues) {
  const Scenario s = parse(
      "# comment\n; another\n"
      "[scenario]\nid = \"demo\"\ntarget = resolvent\n"
      "[grid]\ndim = 2\nn = 32\nhalf_width = 8\n"
      "[initial]\nmomentum = [1.5, -2]\n"
      "[resolvent]\nregime = high\ntrapping = true\n");
  EXPECT_EQ(s.id, "demo");
  EXPECT_EQ(s.target, Target::resolvent);
  EXPECT_EQ(s.dim, 2);
  EXPECT_DOUBLE_EQ(s.half_width, 8.0);
  ASSERT_EQ(s.momentum.size(), 2u);
  EXPECT_DOUBLE_EQ(s.momentum[0], 1.5);
  EXPECT_DOUBLE_EQ(s.momentum[1], -2.0);
  EXPECT_EQ(s.regime, Regime::high);
  EXPECT_TRUE(s.trapping);
}

TEST(Scenario, UnknownKeyIsNamed) {
  const auto msg = error_of("[grid]\nspacing = 3\n");
  EXPECT_NE(msg.find("grid.spacing"), std::string::npos) << msg;
}

TEST(Scenario, UnknownSectionAndStrayKeyRejected) {
  EXPECT_NE(error_of("[gird]\nn = 3\n").find("gird"), std::string::npos);
  EXPECT_NE(error_of("n = 3\n"), "");
}

TEST(Scenario, BadValuesRejected) {
  EXPECT_NE(error_of("[grid]\nn = many\n"), "");
  EXPECT_NE(error_of("[grid]\ndim = 0\n"), "");
  EXPECT_NE(error_of("[metric]\nkind = wobbly\n"), "");
  EXPECT_NE(error_of("[grid]\ndim = 2\n[initial]\nmomentum = [1, 2, 3]\n"), "");
}

TEST(Scenario, EmitRoundTripsEveryBuiltin) {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin_scenario(name);
    const std::string text = emit_scenario(s);
    EXPECT_EQ(emit_scenario(parse(text)), text) << name;
    EXPECT_EQ(s.id, name);
    EXPECT_NO_THROW(load_scenario("builtin:" + name));
  }
}

TEST(Scenario, RoundTripKeepsShortestDoubles) {
  Scenario s;
  s.dt = 0.1;
  s.half_width = 1.0 / 3.0;
  const Scenario back = parse(emit_scenario(s));
  EXPECT_EQ(back.dt, 0.1);
  EXPECT_EQ(back.half_width, 1.0 / 3.0);
  EXPECT_NE(emit_scenario(s).find("dt = 0.1\n"), std::string::npos);
}

TEST(Scenario, EmitListsEveryKey) {
  const std::string text = emit_scenario(Scenario{});
  for (const auto& key : scenario_keys()) {
    EXPECT_NE(text.find(key.substr(key.find('.') + 1) + " = "), std::string::npos) << key;
  }
}

TEST(Scenario, OverridesBeatFileValues) {
  Scenario s = parse("[grid]\nn = 32\n");
  apply_override(s, "grid.n=48");
  apply_override(s, "evolution.sigma = [0, 1, 2]");
  EXPECT_EQ(s.n, 48);
  EXPECT_EQ(s.sigma.size(), 3u);
  EXPECT_THROW(apply_override(s, "grid.m=4"), ConfigError);
  EXPECT_THROW(apply_override(s, "grid.n"), ConfigError);
  EXPECT_THROW(apply_override(s, "grid.n=lots"), ConfigError);
}

TEST(Scenario, OverridesAreCheckedTogether) {
  Scenario s;
  apply_override(s, "initial.momentum_min=2");
  EXPECT_THROW(validate_scenario(s), ConfigError);
  apply_override(s, "initial.momentum_max=3");
  EXPECT_NO_THROW(validate_scenario(s));
}

TEST(Scenario, UnknownBuiltinRejected) { EXPECT_THROW(load_scenario("builtin:nope"), ConfigError); }

TEST(Scenario, HypothesisStamps) {
  EXPECT_TRUE(hypothesis_violations(builtin_scenario("free3d-decay")).empty());
  const auto one_d = hypothesis_violations(builtin_scenario("free1d-decay"));
  ASSERT_FALSE(one_d.empty());
  EXPECT_NE(one_d.front().find("d = 1"), std::string::npos);

  Scenario low_delta = builtin_scenario("free3d-decay");
  low_delta.delta = 2.1;  // kappa + 1/2 = 2.5 in d = 3
  EXPECT_FALSE(hypothesis_violations(low_delta).empty());

  Scenario wild_alpha = builtin_scenario("bump3d-damped-decay");
  wild_alpha.damping.alpha = 2.5;
  EXPECT_FALSE(hypothesis_violations(wild_alpha).empty());

  Scenario apriori = builtin_scenario("flat2d-highfreq");
  apriori.regime = Regime::a_priori;
  EXPECT_TRUE(hypothesis_violations(apriori).empty());
}

TEST(Scenario, LowFrequencyDeltaRule) {
  Scenario s;
  s.target = Target::resolvent;
  s.regime = Regime::low;
  s.dim = 5;
  s.power_n = 1;  // 2n + 1 < d, so delta > n + 1 is needed
  s.delta = 1.8;
  EXPECT_FALSE(hypothesis_violations(s).empty());
  s.delta = 2.1;
  EXPECT_TRUE(hypothesis_violations(s).empty());
  s.dim = 3;  // 2n + 1 >= d, so n + 1/2 suffices
  s.delta = 1.6;
  EXPECT_TRUE(hypothesis_violations(s).empty());
}

TEST(Scenario, ZScheduleIsGeometric) {
  const auto z = z_schedule(4.0, 100.0, 1.3, 0.01);
  ASSERT_GE(z.size(), 2u);
  EXPECT_DOUBLE_EQ(z.front().real(), 4.0);
  EXPECT_DOUBLE_EQ(z.front().imag(), 0.04);
  EXPECT_LE(z.back().real(), 100.0 * (1 + 1e-9));
  EXPECT_EQ(z.size(), static_cast<std::size_t>(std::floor(std::log(25.0) / std::log(1.3))) + 1);
  for (std::size_t k = 1; k < z.size(); ++k) EXPECT_NEAR(z[k].real() / z[k - 1].real(), 1.3, 1e-12);
  EXPECT_THROW(z_schedule(0.0, 1.0, 2.0, 0.1), std::invalid_argument);
  EXPECT_THROW(z_schedule(1.0, 2.0, 1.0, 0.1), std::invalid_argument);
}
