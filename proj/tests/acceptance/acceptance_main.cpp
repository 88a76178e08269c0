// One line per acceptance criterion. Arguments select criteria ("acceptance 1 3");
// no arguments runs all eight. Exit status is nonzero if any selected line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "dense_oracle.hpp"
#include "dslab/diagnostics.hpp"
#include "dslab/experiments.hpp"

namespace fs = std::filesystem;
using namespace dslab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return format_number(v); }

std::string verdict_line(const VerdictReport& r) {
  std::ostringstream out;
  out << r.scenario_id << " " << to_string(r.overall());
  for (const auto& v : r.verdicts) {
    if (v.status != Status::pass) out << " [" << v.name << " " << to_string(v.status) << ": " << fmt(v.measured) << "; " << v.detail << "]";
  }
  return out.str();
}

const Verdict* find(const VerdictReport& r, const std::string& name) {
  for (const auto& v : r.verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

bool passed(const VerdictReport& r, const std::string& name) {
  const auto* v = find(r, name);
  return v && v->status == Status::pass;
}

Outcome structural() {
  bool ok = true;
  std::ostringstream d;
  for (const char* name : {"structural-flat", "structural-bump"}) {
    const Scenario s = builtin_scenario(name);
    if (s.dim > 2 || s.n > 128) return {false, std::string(name) + " is larger than the criterion allows"};
    const auto r = run_structural_suite(s);
    for (const char* check : {"dissipative", "accretive", "quadratic_estimate", "trivial_bound"}) {
      ok = ok && passed(r, check);
    }
    d << name << ": max Im " << fmt(r.measurements.at("max_imag")) << ", min Re " << fmt(r.measurements.at("min_real"))
      << ", |T R T*| " << fmt(r.measurements.at("quadratic_norm_max")) << ", |R f| Im z/|f| "
      << fmt(r.measurements.at("trivial_bound_max")) << "; ";
  }
  return {ok, d.str()};
}

// Operator H on a 1D grid next to its dense matrix built independently.
struct Dense1D {
  Grid grid;
  DampedOperator op;
  Eigen::MatrixXcd H;
  Eigen::VectorXd x;
};

Dense1D dense_case(int n, double L) {
  MetricSpec m;
  m.kind = MetricKind::conformal_bump;
  m.amplitude = 0.4;
  DampingSpec a;
  a.kind = DampingKind::gaussian;
  a.amplitude = 0.9;
  a.width = 1.0;
  a.alpha = 1.0;
  a.center = {0.0};
  const Grid g = make_grid(1, n, L);
  auto op = assemble(g, m, a);
  const Eigen::VectorXd x = oracle::coordinates_1d(n, L);
  Eigen::VectorXd c(n), amp(n);
  for (int i = 0; i < n; ++i) {
    c(i) = 1.0 + 0.4 * std::exp(-x(i) * x(i));
    amp(i) = 0.9 * std::exp(-x(i) * x(i));
  }
  return {g, std::move(op), oracle::damped_operator_matrix(n, L, c, amp, 1.0), x};
}

Outcome oracle_equivalence() {
  const int n = 64;
  const double L = 8.0;
  auto d = dense_case(n, L);
  const auto id = Eigen::MatrixXcd::Identity(n, n);
  std::mt19937_64 rng(2024);

  double solve_err = 0.0;
  for (Complex z : {Complex(1.0, 0.2), Complex(10.0, 0.5), Complex(-2.0, 0.01), Complex(30.0, 1.0), Complex(-0.5, 0.0)}) {
    const auto f = random_field(d.grid, rng);
    const Eigen::VectorXcd expected = (d.H - z * id).partialPivLu().solve(oracle::to_vector(f));
    const auto r = solve(d.op, z, f, 1e-12);
    solve_err = std::max(solve_err, (oracle::to_vector(r.u) - expected).norm() / expected.norm());
  }

  std::uniform_real_distribution<double> re(-1.0, 12.0), im(0.05, 1.0), del(0.0, 2.0), bet(0.0, 1.0);
  double norm_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    ResolventQuery q;
    q.z = Complex(re(rng), im(rng));
    q.n = k % 3;
    q.delta_left = del(rng);
    q.delta_right = del(rng);
    q.deriv_left = bet(rng);
    q.deriv_right = bet(rng);
    q.seed = 500 + k;
    Eigen::VectorXd wl(n), wr(n);
    for (int i = 0; i < n; ++i) {
      wl(i) = std::pow(1.0 + d.x(i) * d.x(i), -q.delta_left / 2);
      wr(i) = std::pow(1.0 + d.x(i) * d.x(i), -q.delta_right / 2);
    }
    const Eigen::MatrixXcd R = (d.H - q.z * id).partialPivLu().inverse();
    Eigen::MatrixXcd Rp = R;
    for (int j = 0; j < q.n; ++j) Rp = Rp * R;
    const Eigen::MatrixXcd M = wl.cast<Complex>().asDiagonal() * oracle::bessel_matrix(n, L, q.deriv_left) * Rp *
                               oracle::bessel_matrix(n, L, q.deriv_right) * wr.cast<Complex>().asDiagonal();
    const double expected = oracle::operator_norm(M);
    norm_err = std::max(norm_err, std::abs(weighted_norm(d.op, q).norm_estimate / expected - 1.0));
  }

  double pert = 0.0;
  bool pert_ok = true;
  for (int m = 0; m <= 2; ++m) {
    const auto p = perturbation_expansion_check(m, 8, 77 + m, 1e-10);
    pert = std::max(pert, p.max_error);
    pert_ok = pert_ok && p.pass;
  }
  const bool ok = solve_err <= 1e-8 && norm_err <= 1e-3 && pert_ok;
  return {ok, "solve vs LU " + fmt(solve_err) + " (<= 1e-8), weighted_norm vs SVD " + fmt(norm_err) +
                  " over 20 queries (<= 1e-3), perturbation expansion " + fmt(pert) + " (<= 1e-10)"};
}

Outcome dilation_laws() {
  double worst = 0.0, formula = 0.0;
  bool exact_grids = true;
  for (int dim : {1, 2}) {
    const Grid g = make_grid(dim, dim == 1 ? 512 : 128, 16.0);
    // Width 2 keeps the 4x-contracted packet resolved at dx = 0.25, so the discrete
    // norms agree with the continuum ones to round-off.
    const ComplexField f = gaussian_packet(g, std::vector<double>(dim, 0.0), 2.0, std::vector<double>(dim, 0.5));
    for (double factor : {2.0, 4.0}) {
      const double theta = std::log(factor);
      exact_grids = exact_grids && dilation_is_grid_exact(g, theta);
      const ComplexField u = dilate(f, {theta, dim});
      for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
        // e^{theta (d/2 - d/p)}, written out here rather than taken from the library
        const double expected = std::exp(theta * (dim / 2.0 - (std::isinf(p) ? 0.0 : dim / p)));
        worst = std::max(worst, std::abs(lp_norm(u, p) / lp_norm(f, p) - expected));
        formula = std::max(formula, std::abs(dilation_lp_factor(theta, dim, p) - expected));
      }
    }
  }
  return {exact_grids && worst <= 1e-12 && formula <= 1e-12,
          "max |measured factor - e^{theta(d/2-d/p)}| " + fmt(worst) + ", library formula error " + fmt(formula) +
              " (<= 1e-12), grid-exact " + (exact_grids ? "yes" : "no")};
}

Outcome local_energy_decay() {
  const auto free = run_local_energy_decay(builtin_scenario("free3d-decay"));
  const auto bump = run_local_energy_decay(builtin_scenario("bump3d-damped-decay"));
  const double slope = free.measurements.count("slope") ? free.measurements.at("slope") : std::numeric_limits<double>::quiet_NaN();
  const bool free_ok = slope >= -1.7 && slope <= -1.3 && free.overall() == Status::pass;
  const bool bump_ok = bump.overall() == Status::pass || bump.overall() == Status::undecided;
  std::string bump_detail = "bump+damping " + to_string(bump.overall());
  if (bump.measurements.count("slope")) bump_detail += " slope " + fmt(bump.measurements.at("slope"));
  bump_detail += " (max boundary mass " + fmt(bump.diagnostics.at("max_boundary_mass")) + ", wrap at t = " +
                 fmt(bump.diagnostics.at("wrap_time")) + ")";
  return {free_ok && bump_ok, "free slope " + fmt(slope) + " over [" + fmt(free.measurements.at("fit_t_start")) + ", " +
                                  fmt(free.measurements.at("fit_t_end")) + "] in [-1.7, -1.3]; " + bump_detail};
}

Outcome smoothing() {
  const Scenario s = builtin_scenario("damped3d-smoothing");
  const auto r = run_smoothing(s);
  const auto* v = find(r, "ratio_change_on_doubling");
  if (!v) return {false, verdict_line(r)};
  return {s.ensemble == 10 && v->status == Status::pass,
          "max relative change " + fmt(v->measured) + " < 0.05 over " + std::to_string(s.ensemble) + " packets, gamma " +
              fmt(r.measurements.at("gamma")) + ", ratios in [" + fmt(r.measurements.at("ratio_min")) + ", " +
              fmt(r.measurements.at("ratio_max")) + "]"};
}

Outcome resolvent_scaling() {
  const auto high = run_resolvent_regime(builtin_scenario("flat2d-highfreq"));
  const auto low = run_resolvent_regime(builtin_scenario("flat3d-sharplow"));
  const double slope = high.measurements.at("slope");
  const double ratio = low.measurements.at("max_over_min");
  const bool ok = high.overall() == Status::pass && slope >= -0.65 && slope <= -0.35 &&
                  low.overall() == Status::pass && ratio < 10.0;
  return {ok, "high-frequency slope " + fmt(slope) + " in [-0.65, -0.35] (" + to_string(high.overall()) +
                  "), sharp low max/min " + fmt(ratio) + " < 10 (" + to_string(low.overall()) + ")"};
}

Outcome classical() {
  const auto r = run_classical_suite(builtin_scenario("trapping2d-gcc"));
  std::ostringstream d;
  for (const auto& v : r.verdicts) d << v.name << " " << to_string(v.status) << " (" << fmt(v.measured) << "); ";
  return {r.overall() == Status::pass, d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
  for (const auto& n : names) {
    if (!fs::exists(a / n) || !fs::exists(b / n) || slurp(a / n) != slurp(b / n)) {
      why = n;
      return false;
    }
  }
  return true;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "dslab_acceptance_determinism";
  fs::remove_all(root);
  int compared = 0;
  std::string mismatch;
  for (const auto& name : builtin_names()) {
    Scenario s = builtin_scenario(name);
    for (int run = 0; run < 2; ++run) {
      // the second run uses two threads; thread count must not leak into the output
      write_report(root / name / std::to_string(run), run_scenario(s, {42, run + 1, 1.0}));
    }
    std::string why;
    if (!same_tree(root / name / "0", root / name / "1", why)) mismatch += name + ":" + why + " ";
    ++compared;
  }
  fs::remove_all(root);
  return {mismatch.empty(), std::to_string(compared) + " built-ins run twice (1 and 2 threads), report.json and CSVs " +
                                (mismatch.empty() ? std::string("byte-identical") : "differ: " + mismatch)};
}

}  // namespace

int main(int argc, char** argv) {
  set_warning_handler([](const std::string&) {});
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "structural suite", 60, structural},
      {2, "oracle equivalence", 120, oracle_equivalence},
      {3, "dilation laws", 10, dilation_laws},
      {4, "local energy decay", 600, local_energy_decay},
      {5, "smoothing effect", 600, smoothing},
      {6, "resolvent scaling", 900, resolvent_scaling},
      {7, "classical flow", 120, classical},
      {8, "determinism", 3600, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all_ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool ok = o.pass && in_budget;
    all_ok = all_ok && ok;
    std::printf("criterion %d %s: %s (%.1f s of %.0f s budget) %s\n", c.id, c.name, ok ? "PASS" : "FAIL", secs,
                c.budget_s, o.detail.c_str());
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
