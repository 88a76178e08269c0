#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dslab/model.hpp"

namespace dslab {

struct PhaseSpacePoint {
  std::vector<double> x;
  std::vector<double> xi;
};

/// p(x, xi) = <G(x) xi, xi>
double symbol_p(const MetricSpec& metric, const PhaseSpacePoint& w);
/// Rescales xi so that p(w) = energy.
PhaseSpacePoint on_energy_shell(const MetricSpec& metric, PhaseSpacePoint w, double energy = 1.0);

enum class FlowClass { escaped, trapped_up_to_T, integrator_failure };
std::string to_string(FlowClass c);

struct TrajectorySample {
  double t = 0.0;
  PhaseSpacePoint w;
  double p = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> points;  // increasing t, backward half first
  FlowClass classification = FlowClass::trapped_up_to_T;
  std::optional<double> escape_time;     // signed; earliest |t| at which escape was seen
  double dt = 0.0;                       // step actually used after halving
  int halvings = 0;
  double max_energy_drift = 0.0;         // max |p(t) - p(0)| / p(0)
};

struct FlowOptions {
  double dt = 0.01;
  int max_halvings = 4;
  double conservation_tol = 1e-6;
  /// Fixed-point tolerance of the implicit midpoint stage.
  double stage_tol = 1e-14;
  int record_every = 1;
  bool backward = true;
  /// Stop a time direction once |X| > r_escape with outward radial velocity.
  std::optional<double> r_escape;
};

/// Implicit-midpoint integration of x' = dp/dxi, xi' = -dp/dx over
/// [-t_max, t_max] (or [0, t_max] without `backward`). A step that fails the
/// energy gate restarts the whole run with dt halved.
Trajectory flow(const MetricSpec& metric, const PhaseSpacePoint& w0, double t_max,
                const FlowOptions& opts = {});

/// Single-direction flow of signed duration t; the endpoint only.
PhaseSpacePoint flow_to(const MetricSpec& metric, const PhaseSpacePoint& w0, double t, double dt);

/// Finite-horizon surrogate for membership in the bounded-orbit set: a point
/// escapes if, in either time direction, it leaves the ball of radius
/// r_escape moving outward before |t| = t_max.
FlowClass classify_trapped(const MetricSpec& metric, const PhaseSpacePoint& w0, double t_max,
                           double r_escape, FlowOptions opts = {});

/// Built-in trapping metric: trapping_well with amplitude 10 and width 1.
MetricSpec trapping_metric(double amplitude = 10.0, double width = 1.0);
/// Radius of the circular geodesic of a trapping_well; `stable` picks the
/// inner ring (minimum of the effective potential), otherwise the outer,
/// hyperbolic one.
double trapping_ring_radius(const MetricSpec& metric, bool stable = true);
/// Point on the ring moving tangentially (first two axes) with p = 1.
PhaseSpacePoint ring_launch(const MetricSpec& metric, int dim, bool stable = true);

enum class GccStatus { not_trapped, satisfied, violated, undecided };
std::string to_string(GccStatus s);

struct GccReport {
  std::vector<FlowClass> classes;
  std::vector<GccStatus> status;
  int trapped = 0;
  int satisfied = 0;
  int violated = 0;
  int undecided = 0;
  double t_max = 0.0;
  GccStatus verdict = GccStatus::satisfied;
  std::string message;
};

struct GccOptions {
  double r_escape = 0.0;  // 0 picks 4 * metric width + 4
  FlowOptions flow{};
  int threads = 1;
};

/// Sampled geometric control: every trapped_up_to_T sample must reach
/// a(X(T)) > a_threshold for some |T| <= t_max.
GccReport check_damping_condition(const MetricSpec& metric, const DampingSpec& damping,
                                  const std::vector<PhaseSpacePoint>& sample, double t_max,
                                  double a_threshold, const GccOptions& opts = {});

/// Optional correction symbol f_c(x, xi); its bracket is taken by central
/// differences.
using PhaseSymbol = std::function<double(const PhaseSpacePoint&)>;

/// chi_alpha(r) = r^{alpha/2} exp(-2 (r - 1)^2): peaks near r = 1 and stays
/// below r^{alpha/2}.
double chi_alpha(double r, double alpha);

/// {p, x.xi} = 2 <G xi, xi> - sum_k x_k <d_k G xi, xi>
double escape_bracket(const MetricSpec& metric, const PhaseSpacePoint& w);

struct EscapeProbeReport {
  int samples = 0;
  double minimum = 0.0;       // min of {p, f0 + f_c} + beta b over the samples
  double c0 = 0.0;            // minimum / 3
  bool positive = false;
  PhaseSpacePoint argmin;
  bool chi_audit_ok = true;   // chi_alpha(|xi|^2) <= |xi|^alpha at every sample
};

struct EscapeProbeOptions {
  double radius = 3.0;  // samples in |x| <= radius
  std::uint64_t seed = 42;
  int threads = 1;
};

EscapeProbeReport escape_symbol_probe(const MetricSpec& metric, const DampingSpec& damping,
                                      const PhaseSymbol& f_c, double beta,
                                      std::pair<double, double> energy_window, int n_samples,
                                      int dim, const EscapeProbeOptions& opts = {});

/// Columns t, x_1..x_d, xi_1..xi_d, p.
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

}  // namespace dslab
