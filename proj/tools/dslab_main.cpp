#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dslab/diagnostics.hpp"
#include "dslab/experiments.hpp"

namespace fs = std::filesystem;
using namespace dslab;

namespace {

constexpr int kUsageError = 3;

struct Common {
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out;
  std::vector<std::string> overrides;
  double tol_scale = 1.0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--out", c.out, "Output directory (default $DSLAB_OUT/<id>, else runs/<id>)");
  app->add_option("--override", c.overrides, "section.key=value, repeatable; applied after the file");
  app->add_option("--tol-scale", c.tol_scale, "Multiplies every pass tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

Scenario resolve(const std::string& ref, const Common& c) {
  Scenario s = load_scenario(ref);
  for (const auto& o : c.overrides) apply_override(s, o);
  validate_scenario(s);
  return s;
}

fs::path out_dir(const Common& c, const std::string& id) {
  if (!c.out.empty()) return c.out;
  const char* env = std::getenv("DSLAB_OUT");
  return fs::path(env && *env ? env : "runs") / id;
}

RunOptions run_options(const Common& c) { return {c.seed, c.threads, c.tol_scale}; }

int finish(const VerdictReport& r, const Common& c) {
  const fs::path dir = out_dir(c, r.scenario_id);
  write_report(dir, r);
  for (const auto& v : r.verdicts) {
    std::cout << to_string(v.status) << "  " << v.name << "  measured " << format_number(v.measured) << ", "
              << v.criterion << " (target " << format_number(v.target) << ", tol " << format_number(v.tolerance)
              << ")\n";
  }
  for (const auto& n : r.notes) std::cout << "note: " << n << '\n';
  std::cout << r.scenario_id << ": " << to_string(r.overall()) << "  -> " << (dir / "report.json").string() << '\n';
  return exit_code(r.overall());
}

// "a:b:logstepR" (geometric) or "a:b:stepS" (linear) in tau; z = tau (1 + i ratio).
std::vector<Complex> parse_z_range(const std::string& text, double imag_ratio) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("--z expects a:b:logstepR or a:b:stepS, got '" + text + "'");
  double a = 0, b = 0, step = 0;
  try {
    a = std::stod(parts[0]);
    b = std::stod(parts[1]);
    if (parts[2].rfind("logstep", 0) == 0) return z_schedule(a, b, std::stod(parts[2].substr(7)), imag_ratio);
    if (parts[2].rfind("step", 0) != 0) throw ConfigError("unknown step kind in '" + text + "'");
    step = std::stod(parts[2].substr(4));
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse --z '" + text + "'");
  }
  if (!(step > 0.0) || b < a) throw ConfigError("--z needs a <= b and a positive step");
  std::vector<Complex> z;
  for (int k = 0; a + k * step <= b * (1 + 1e-12); ++k) z.emplace_back(a + k * step, (a + k * step) * imag_ratio);
  return z;
}

std::vector<double> parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream in(text);
  try {
    for (std::string p; std::getline(in, p, ',');) v.push_back(std::stod(p));
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse " + what + " '" + text + "'");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dslab: damped Schrodinger operator experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dslab 0.1.0");

  Common c;
  std::string scenario_ref;

  auto* run = app.add_subcommand("run", "Run a scenario file or builtin:<name>");
  run->add_option("scenario", scenario_ref, "Scenario file or builtin:<name>")->required();
  add_common(run, c);

  std::string regime, z_range, sweep_ref = "builtin:flat2d-highfreq";
  double imag_ratio = -1.0;
  auto* sweep = app.add_subcommand("sweep", "Resolvent norm sweep over an inline z range");
  sweep->add_option("--scenario", sweep_ref, "Operator and weights")->capture_default_str();
  sweep->add_option("--regime", regime, "low, intermediate, high, sharp_low or a_priori");
  sweep->add_option("--z", z_range, "tau range a:b:logstepR or a:b:stepS");
  sweep->add_option("--imag-ratio", imag_ratio, "Im z / Re z (default from scenario)");
  add_common(sweep, c);

  std::string flow_ref = "builtin:trapping2d-gcc", x_text, xi_text;
  double flow_t = -1.0;
  bool shell = false;
  auto* flow_cmd = app.add_subcommand("flow", "Integrate one bicharacteristic of the scenario metric");
  flow_cmd->add_option("--scenario", flow_ref, "Metric source")->capture_default_str();
  flow_cmd->add_option("--x", x_text, "Start position, comma separated (default: stable ring)");
  flow_cmd->add_option("--xi", xi_text, "Start covector, comma separated");
  flow_cmd->add_option("--t-max", flow_t, "Duration (default classical.t_max)");
  flow_cmd->add_flag("--on-shell", shell, "Rescale xi onto p = 1");
  add_common(flow_cmd, c);

  std::string check_ref = "builtin:structural-flat";
  auto* check = app.add_subcommand("check", "Structural suite");
  check->add_option("--scenario", check_ref, "Operator to audit")->capture_default_str();
  add_common(check, c);

  auto* list = app.add_subcommand("list-scenarios", "Built-in scenario names");

  std::string echo_ref;
  auto* echo = app.add_subcommand("echo", "Print the effective scenario after overrides");
  echo->add_option("scenario", echo_ref, "Scenario file or builtin:<name> (default: built-in defaults)");
  add_common(echo, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  set_warning_handler([](const std::string& msg) { std::cerr << "dslab: warning: " << msg << '\n'; });

  try {
    if (*list) {
      for (const auto& name : builtin_names()) {
        std::cout << name << "  " << to_string(builtin_scenario(name).target) << "  "
                  << builtin_scenario(name).description << '\n';
      }
      return 0;
    }
    if (*echo) {
      Scenario s = echo_ref.empty() ? Scenario{} : load_scenario(echo_ref);
      for (const auto& o : c.overrides) apply_override(s, o);
      validate_scenario(s);
      std::cout << emit_scenario(s);
      return 0;
    }
    if (*run) {
      const Scenario s = resolve(scenario_ref, c);
      return finish(run_scenario(s, run_options(c)), c);
    }
    if (*check) {
      Scenario s = resolve(check_ref, c);
      s.target = Target::structural;
      return finish(run_structural_suite(s, run_options(c)), c);
    }
    if (*sweep) {
      Scenario s = resolve(sweep_ref, c);
      s.target = Target::resolvent;
      if (!regime.empty()) s.regime = parse_regime(regime);
      if (imag_ratio >= 0.0) s.imag_ratio = imag_ratio;
      const auto z = z_range.empty() ? z_schedule(s.tau_min, s.tau_max, s.tau_factor, s.imag_ratio)
                                     : parse_z_range(z_range, s.imag_ratio);
      return finish(run_sweep(s, z, run_options(c)), c);
    }
    if (*flow_cmd) {
      const Scenario s = resolve(flow_ref, c);
      const int dim = std::max(2, s.dim);
      PhaseSpacePoint w0 = s.metric.kind == MetricKind::trapping_well ? ring_launch(s.metric, dim)
                                                                      : PhaseSpacePoint{std::vector<double>(dim, 0.0),
                                                                                        std::vector<double>(dim, 0.0)};
      if (!x_text.empty()) w0.x = parse_vector(x_text, "--x");
      if (!xi_text.empty()) w0.xi = parse_vector(xi_text, "--xi");
      if (w0.x.size() != w0.xi.size()) throw ConfigError("--x and --xi must have the same length");
      if (shell) w0 = on_energy_shell(s.metric, w0);
      FlowOptions fo;
      fo.dt = s.flow_dt;
      if (s.r_escape > 0.0) fo.r_escape = s.r_escape;
      const auto tr = flow(s.metric, w0, flow_t > 0.0 ? flow_t : s.flow_t_max, fo);
      const fs::path dir = out_dir(c, s.id);
      fs::create_directories(dir);
      std::ofstream f(dir / "trajectory.csv");
      write_trajectory_csv(f, tr);
      std::cout << "classification " << to_string(tr.classification) << ", dt " << format_number(tr.dt)
                << ", max energy drift " << format_number(tr.max_energy_drift) << "  -> "
                << (dir / "trajectory.csv").string() << '\n';
      return tr.classification == FlowClass::integrator_failure ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "dslab: config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dslab: invalid argument: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "dslab: error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}
