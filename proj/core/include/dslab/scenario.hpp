#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dslab/classical.hpp"
#include "dslab/model.hpp"
#include "dslab/propagator.hpp"
#include "dslab/resolvent.hpp"

namespace dslab {

/// Bad configuration: unknown key, malformed value, unknown scenario.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Target { decay, smoothing, resolvent, structural, classical, loss };
Target parse_target(const std::string& name);
std::string to_string(Target t);

std::string to_string(MetricKind k);
std::string to_string(DampingKind k);
std::string to_string(WeightChoice w);

/// One experiment, read from a TOML-style file with sections
/// [scenario] [grid] [metric] [damping] [initial] [evolution] [resolvent]
/// [classical] [structural] [tolerance].
struct Scenario {
  std::string id = "custom";
  Target target = Target::decay;
  std::string description;

  int dim = 3;
  int n = 64;
  double half_width = 24.0;

  MetricSpec metric{};
  WeightChoice weight = WeightChoice::unit;
  DampingSpec damping{};

  // Gaussian packet; ensembles jitter center and draw the momentum direction.
  std::vector<double> center;
  double width = 1.0;
  std::vector<double> momentum;
  int ensemble = 1;
  double momentum_min = 0.0;
  double momentum_max = 0.0;
  double center_jitter = 0.0;

  double dt = 0.05;
  double t_max = 4.0;
  Scheme scheme = Scheme::strang_split;
  int record_every = 1;
  double delta = 2.6;
  double gamma = -1.0;  // < 0 picks alpha~
  double fit_start = 2.0;
  double fit_end = 0.0;  // 0 ends the fit at the wrap time
  std::vector<double> sigma{0.0, 2.0};
  bool double_horizon = true;

  Regime regime = Regime::high;
  int power_n = 0;
  double tau_min = 4.0;
  double tau_max = 100.0;
  double tau_factor = 1.3;
  double imag_ratio = 0.01;
  double solver_tol = 1e-8;
  int max_iters = 2000;
  double power_tol = 1e-4;
  int power_max_iters = 200;
  bool trapping = false;

  double flow_t_max = 200.0;
  double flow_dt = 0.01;
  double r_escape = 0.0;
  double a_threshold = 0.1;
  int ring_samples = 8;
  int probe_samples = 2000;
  double probe_radius = 3.0;
  double beta = 0.0;

  int dissipativity_samples = 100;
  int quadratic_points = 5;
  int trivial_bound_samples = 20;
  int perturbation_max_m = 2;
  int perturbation_size = 8;

  double slope_tol = 0.2;
  double ratio_max = 10.0;
  double increment_max = 0.05;
};

Scenario parse_scenario(std::istream& in, const std::string& source = "<stream>");
/// "builtin:<name>" or a file path.
Scenario load_scenario(const std::string& ref);
/// "section.key=value". Only the value itself is checked; call
/// validate_scenario once the last override is in, since some keys constrain
/// each other (momentum_min <= momentum_max, list lengths vs dim).
void apply_override(Scenario& s, const std::string& assignment);
void validate_scenario(const Scenario& s);
/// Every key, in a fixed order; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& s);
/// "section.key" for every accepted key.
std::vector<std::string> scenario_keys();

std::vector<std::string> builtin_names();
Scenario builtin_scenario(const std::string& name);

/// Hypotheses of the targeted estimate that the parameters break; an empty
/// list means in-hypothesis.
std::vector<std::string> hypothesis_violations(const Scenario& s);

/// z_k = tau_k (1 + i imag_ratio) with tau geometric from tau_min by tau_factor.
std::vector<Complex> z_schedule(double tau_min, double tau_max, double factor, double imag_ratio);

}  // namespace dslab
