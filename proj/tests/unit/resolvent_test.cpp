#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "dslab/resolvent.hpp"

using namespace dslab;
using std::numbers::pi;

namespace {

constexpr Complex I(0.0, 1.0);

DampingSpec gaussian_damping(double amplitude, double width, double alpha) {
  DampingSpec d;
  d.kind = DampingKind::gaussian;
  d.amplitude = amplitude;
  d.width = width;
  d.alpha = alpha;
  return d;
}

MetricSpec bump_metric(double amplitude) {
  MetricSpec m;
  m.kind = MetricKind::conformal_bump;
  m.amplitude = amplitude;
  return m;
}

struct Dense1D {
  int n;
  double L;
  Grid grid;
  DampedOperator op;
  Eigen::MatrixXcd H;
};

Dense1D damped_1d(int n, double L, double eps, double amp, double alpha) {
  const Grid g = make_grid(1, n, L);
  auto op = assemble(g, bump_metric(eps), gaussian_damping(amp, 1.0, alpha));
  const Eigen::VectorXd x = oracle::coordinates_1d(n, L);
  Eigen::VectorXd c(n), a(n);
  for (int i = 0; i < n; ++i) {
    c(i) = 1.0 + eps * std::exp(-x(i) * x(i));
    a(i) = amp * std::exp(-x(i) * x(i));
  }
  return {n, L, g, std::move(op), oracle::damped_operator_matrix(n, L, c, a, alpha)};
}

Eigen::MatrixXcd dense_resolvent(const Eigen::MatrixXcd& H, Complex z) {
  const auto n = H.rows();
  return (H - z * Eigen::MatrixXcd::Identity(n, n)).partialPivLu().inverse();
}

}  // namespace

TEST(Solve, FreePlaneWave) {
  const Grid g = make_grid(2, 16, 4.0);
  const auto op = assemble(g, MetricSpec{}, DampingSpec{});
  const std::vector<int> modes = {3, -1};
  const auto f = plane_wave(g, modes);
  const Complex z(2.0, 0.5);
  const double k2 = (9 + 1) * std::pow(pi / 4.0, 2);
  const auto r = solve(op, z, f);
  const ComplexField expected = (1.0 / (k2 - z)) * f;
  EXPECT_LT(l2_norm(r.u - expected) / l2_norm(expected), 1e-10);
}

TEST(Solve, TrivialBoundOnDampedOperator) {
  const Grid g = make_grid(2, 32, 6.0);
  const auto op = assemble(g, bump_metric(0.5), gaussian_damping(1.0, 1.0, 1.0));
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> re(-5.0, 20.0), im(0.05, 3.0);
  for (int s = 0; s < 5; ++s) {
    const Complex z(re(rng), im(rng));
    const auto f = random_field(g, rng);
    const auto r = solve(op, z, f, 1e-8);
    EXPECT_LE(l2_norm(r.u), (1.0 + 1e-7) * l2_norm(f) / z.imag());
  }
}

TEST(Solve, MatchesDenseLU) {
  auto d = damped_1d(64, 8.0, 0.4, 0.9, 1.0);
  std::mt19937_64 rng(1);
  for (Complex z : {Complex(1.0, 0.2), Complex(10.0, 0.5), Complex(-2.0, 0.01)}) {
    const auto f = random_field(d.grid, rng);
    const Eigen::VectorXcd expected = dense_resolvent(d.H, z) * oracle::to_vector(f);
    const auto r = solve(d.op, z, f, 1e-11);
    EXPECT_LT((oracle::to_vector(r.u) - expected).norm() / expected.norm(), 1e-8);
  }
}

TEST(Solve, LeftHalfPlaneIsAccepted) {
  auto d = damped_1d(32, 6.0, 0.0, 0.5, 1.0);
  std::mt19937_64 rng(2);
  const auto f = random_field(d.grid, rng);
  const Complex z(-1.0, 0.0);
  const auto r = solve(d.op, z, f);
  EXPECT_LE(l2_norm(r.u), (1.0 + 1e-7) * l2_norm(f) / 1.0);
}

TEST(Solve, RejectsClosedLowerRightRegion) {
  const auto op = assemble(make_grid(1, 8, 2.0), MetricSpec{}, DampingSpec{});
  const ComplexField f(op.grid());
  EXPECT_THROW(solve(op, Complex(1.0, 0.0), f), std::invalid_argument);
  EXPECT_THROW(solve(op, Complex(1.0, -0.5), f), std::invalid_argument);
  EXPECT_THROW(solve(op, Complex(0.0, 0.0), f), std::invalid_argument);
}

TEST(Solve, NonConvergenceCarriesBestResidual) {
  auto d = damped_1d(64, 8.0, 0.4, 2.0, 1.0);
  std::mt19937_64 rng(3);
  const auto f = random_field(d.grid, rng);
  try {
    (void)solve(d.op, Complex(5.0, 0.01), f, 1e-14, 2);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.best_residual(), 1e-14);
    EXPECT_LT(e.best_residual(), 1.0 + 1e-12);
  }
}

TEST(Solve, FirstResolventIdentity) {
  const Grid g = make_grid(2, 16, 4.0);
  const auto op = assemble(g, bump_metric(0.3), gaussian_damping(0.8, 1.0, 0.5));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> re(-3.0, 10.0), im(0.1, 2.0);
  const double tol = 1e-9;
  for (int s = 0; s < 5; ++s) {
    const Complex z1(re(rng), im(rng)), z2(re(rng), im(rng));
    const auto f = random_field(g, rng);
    const auto a = solve(op, z1, f, tol).u;
    const auto b = solve(op, z2, f, tol).u;
    const auto ab = solve(op, z1, b, tol).u;
    ComplexField lhs = a - b;
    lhs.axpy(-(z1 - z2), ab);
    const double scale = 1.0 / (z1.imag() * z2.imag()) + std::abs(z1 - z2) / (z1.imag() * z1.imag() * z2.imag());
    EXPECT_LE(l2_norm(lhs), 10 * tol * scale * l2_norm(f));
  }
}

TEST(WeightedNorm, FreeUnweightedEqualsInverseSpectralDistance) {
  const Grid g = make_grid(2, 16, 4.0);
  const auto op = assemble(g, MetricSpec{}, DampingSpec{});
  ResolventQuery q;
  q.z = Complex(3.7, 0.3);
  q.power.rel_tol = 1e-10;
  q.power.max_iters = 2000;
  const auto r = weighted_norm(op, q);
  double dist = std::numeric_limits<double>::infinity();
  for (double k2 : g.frequency_squared()) dist = std::min(dist, std::abs(k2 - q.z));
  EXPECT_NEAR(r.norm_estimate * dist, 1.0, 1e-4);
  EXPECT_TRUE(r.converged);
}

TEST(WeightedNorm, WeightsNeverIncreaseTheNorm) {
  const Grid g = make_grid(1, 64, 8.0);
  const auto op = assemble(g, bump_metric(0.3), gaussian_damping(0.8, 1.0, 1.0));
  ResolventQuery q;
  q.z = Complex(2.0, 0.2);
  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {0.0, 0.5, 1.0, 2.0}) {
    q.delta_left = q.delta_right = delta;
    const double v = weighted_norm(op, q).norm_estimate;
    EXPECT_LE(v, prev * (1.0 + 2e-4));
    prev = v;
  }
}

TEST(WeightedNorm, MatchesDenseSvd) {
  auto d = damped_1d(64, 8.0, 0.4, 0.9, 1.0);
  const Eigen::VectorXd x = oracle::coordinates_1d(d.n, d.L);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> re(-1.0, 12.0), im(0.05, 1.0), del(0.0, 2.0), bet(0.0, 1.0);
  for (int s = 0; s < 6; ++s) {
    ResolventQuery q;
    q.z = Complex(re(rng), im(rng));
    q.n = s % 3;
    q.delta_left = del(rng);
    q.delta_right = del(rng);
    q.deriv_left = bet(rng);
    q.deriv_right = bet(rng);
    q.seed = 100 + s;
    Eigen::VectorXd wl(d.n), wr(d.n);
    for (int i = 0; i < d.n; ++i) {
      wl(i) = std::pow(1.0 + x(i) * x(i), -q.delta_left / 2);
      wr(i) = std::pow(1.0 + x(i) * x(i), -q.delta_right / 2);
    }
    const Eigen::MatrixXcd R = dense_resolvent(d.H, q.z);
    Eigen::MatrixXcd Rp = R;
    for (int k = 0; k < q.n; ++k) Rp = Rp * R;
    const Eigen::MatrixXcd M = wl.cast<Complex>().asDiagonal() * oracle::bessel_matrix(d.n, d.L, q.deriv_left) *
                               Rp * oracle::bessel_matrix(d.n, d.L, q.deriv_right) *
                               wr.cast<Complex>().asDiagonal();
    const double expected = oracle::operator_norm(M);
    const auto r = weighted_norm(d.op, q);
    EXPECT_NEAR(r.norm_estimate / expected, 1.0, 1e-3) << "z=" << q.z << " n=" << q.n;
  }
}

TEST(WeightedNorm, RejectsInvalidQueries) {
  const auto op = assemble(make_grid(1, 8, 2.0), MetricSpec{}, DampingSpec{});
  ResolventQuery q;
  q.z = Complex(1.0, -1.0);
  EXPECT_THROW(weighted_norm(op, q), std::invalid_argument);
  q.z = Complex(1.0, 1.0);
  q.deriv_left = q.deriv_right = 1.5;
  EXPECT_THROW(weighted_norm(op, q), std::invalid_argument);
  q.deriv_left = q.deriv_right = 0.0;
  q.solver_tol = 0.5;
  EXPECT_THROW(weighted_norm(op, q), std::invalid_argument);
}

TEST(DerivativePower, FreePlaneWaveScalarCalculus) {
  const Grid g = make_grid(1, 16, 4.0);
  const auto op = assemble(g, MetricSpec{}, DampingSpec{});
  const std::vector<int> modes = {2};
  const auto f = plane_wave(g, modes);
  const double lambda = std::pow(2 * pi / 4.0, 2);
  const Complex z(1.0, 0.5);
  const auto u0 = solve(op, z, f, 1e-13).u;
  for (double h : {1e-2, 1e-3}) {
    ComplexField dd = solve(op, z + h, f, 1e-13).u - u0;
    dd *= Complex(1.0 / h);
    const Complex exact = 1.0 / ((lambda - z) * (lambda - z));
    const Complex measured = dd[3] / f[3];
    EXPECT_NEAR(std::abs(measured - exact), h * std::abs(exact / (lambda - z - h)), 1e-8);
  }
}

TEST(DerivativePower, DampedErrorRatiosAreFirstOrder) {
  const Grid g = make_grid(2, 16, 4.0);
  const auto op = assemble(g, bump_metric(0.3), gaussian_damping(1.0, 1.0, 1.0));
  const auto rep = derivative_power_check(op, Complex(2.0, 0.5));
  ASSERT_EQ(rep.ratios.size(), 2u);
  for (double r : rep.ratios) {
    EXPECT_GE(r, 8.0);
    EXPECT_LE(r, 12.0);
  }
  EXPECT_TRUE(rep.pass);
}

TEST(DerivativePower, SmallStepLimitMatchesDenseSquare) {
  auto d = damped_1d(32, 6.0, 0.3, 0.8, 1.0);
  const Complex z(1.5, 0.4);
  const Eigen::MatrixXcd R = dense_resolvent(d.H, z);
  std::mt19937_64 rng(42);
  const auto f = random_field(d.grid, rng);
  const Eigen::VectorXcd r2 = R * (R * oracle::to_vector(f));
  const auto rep = derivative_power_check(d.op, z, {1e-2, 1e-3, 1e-4}, 42);
  // err(h) = h |R(z+h) R(z)^2 f| / |R^2 f| -> 0 linearly.
  const double slope_bound = oracle::operator_norm(dense_resolvent(d.H, z + 1e-4));
  EXPECT_LE(rep.errors.back(), 1e-4 * slope_bound * 1.01);
  EXPECT_GT(r2.norm(), 0.0);
}

TEST(DerivativePower, RejectsStepsAboveImaginaryPart) {
  const auto op = assemble(make_grid(1, 8, 2.0), MetricSpec{}, DampingSpec{});
  EXPECT_THROW(derivative_power_check(op, Complex(1.0, 1e-3), {1e-2}), std::invalid_argument);
}

TEST(QuadraticEstimate, ZeroWithoutDamping) {
  const auto op = assemble(make_grid(1, 16, 4.0), MetricSpec{}, DampingSpec{});
  const auto rep = quadratic_estimate_check(op, I, 2);
  EXPECT_EQ(rep.norm, 0.0);
  EXPECT_TRUE(rep.pass);
}

TEST(QuadraticEstimate, BoundedByOneForGaussianBump) {
  const auto op = assemble(make_grid(2, 32, 6.0), bump_metric(0.3), gaussian_damping(2.0, 1.0, 1.0));
  const auto rep = quadratic_estimate_check(op, I, 2);
  EXPECT_TRUE(rep.pass) << rep.norm;
  EXPECT_GT(rep.norm, 0.1);
}

TEST(QuadraticEstimate, MatchesDenseOracle) {
  auto d = damped_1d(64, 8.0, 0.4, 1.5, 1.0);
  const Eigen::VectorXd x = oracle::coordinates_1d(d.n, d.L);
  Eigen::VectorXd a(d.n);
  for (int i = 0; i < d.n; ++i) a(i) = 1.5 * std::exp(-x(i) * x(i));
  const Eigen::MatrixXcd T = oracle::bessel_matrix(d.n, d.L, 0.5) * a.cast<Complex>().asDiagonal();
  for (Complex z : {Complex(0.0, 1.0), Complex(3.0, 0.1)}) {
    const double expected = oracle::operator_norm(T * dense_resolvent(d.H, z) * T.adjoint());
    const auto rep = quadratic_estimate_check(d.op, z, 2);
    EXPECT_NEAR(rep.norm / expected, 1.0, 1e-3);
    EXPECT_LE(expected, 1.0 + 1e-10);
  }
}

TEST(PerturbationExpansion, OrderZeroIdentity) {
  const auto rep = perturbation_expansion_check(0, 8, 1, 1e-12);
  EXPECT_EQ(rep.words, 3u);
  EXPECT_TRUE(rep.pass) << rep.max_error;
}

TEST(PerturbationExpansion, HigherOrdersMatchBruteForce) {
  for (int m : {1, 2, 3}) {
    const auto rep = perturbation_expansion_check(m, 8, 7 + m);
    EXPECT_TRUE(rep.structure_ok);
    EXPECT_TRUE(rep.zero_coupling_ok);
    EXPECT_LE(rep.max_error, 1e-10) << "m=" << m;
  }
}

TEST(PerturbationExpansion, RejectsOutOfRangeArguments) {
  EXPECT_THROW(perturbation_expansion_check(5, 8, 1), std::invalid_argument);
  EXPECT_THROW(perturbation_expansion_check(1, 33, 1), std::invalid_argument);
}

TEST(FitLogLog, ExactPowerLaw) {
  std::vector<double> t, v;
  for (int i = 1; i <= 10; ++i) {
    t.push_back(i);
    v.push_back(std::pow(i, -1.5));
  }
  const auto fit = fit_log_log(t, v);
  EXPECT_NEAR(fit.slope, -1.5, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(FrequencySweep, APrioriEnvelopeOnLeftVerticalLine) {
  const Grid g = make_grid(1, 64, 8.0);
  const auto op = assemble(g, bump_metric(0.3), gaussian_damping(1.0, 1.0, 1.0));
  ResolventQuery q;
  q.delta_left = q.delta_right = 1.0;
  std::vector<Complex> zs;
  for (double y : {-2.0, -0.5, 0.0, 0.5, 2.0}) zs.emplace_back(-1.0, y);
  const auto table = frequency_sweep(op, Regime::a_priori, q, zs);
  for (const auto& row : table.rows) {
    ASSERT_TRUE(row.converged) << row.error;
    EXPECT_LE(row.norm, row.envelope * (1.0 + 1e-6));
  }
}

TEST(FrequencySweep, RecordsFailuresAndSkipsThem) {
  const Grid g = make_grid(1, 64, 8.0);
  const auto op = assemble(g, MetricSpec{}, gaussian_damping(2.0, 1.0, 1.0));
  ResolventQuery q;
  q.max_iters = 1;
  q.solver_tol = 1e-12;
  const auto table = frequency_sweep(op, Regime::intermediate, q, {Complex(5.0, 0.01)});
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_FALSE(table.rows[0].converged);
  EXPECT_FALSE(table.rows[0].error.empty());
}

TEST(FrequencySweep, HighFrequencyDecayOnSmallGrid) {
  const Grid g = make_grid(1, 256, 32.0);
  const auto op = assemble(g, MetricSpec{}, gaussian_damping(1.0, 1.0, 1.0));
  ResolventQuery q;
  q.delta_left = q.delta_right = 1.0;
  std::vector<Complex> zs;
  for (double tau = 4.0; tau <= 100.0; tau *= 1.6) zs.push_back(tau * Complex(1.0, 0.01));
  const auto table = frequency_sweep(op, Regime::high, q, zs, {false, 2});
  EXPECT_DOUBLE_EQ(table.envelope_exponent, -0.5);
  EXPECT_GT(table.slope, -1.2);
  EXPECT_LT(table.slope, 0.0);
}
