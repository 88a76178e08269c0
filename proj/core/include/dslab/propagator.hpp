#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dslab/model.hpp"

namespace dslab {

enum class Scheme { strang_split, krylov_expm };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

struct Observable {
  enum class Kind { local_energy, smoothing, l2_norm };
  Kind kind = Kind::l2_norm;
  double parameter = 0.0;  // delta for local_energy, gamma for smoothing

  static Observable local_energy(double delta) { return {Kind::local_energy, delta}; }
  static Observable smoothing(double gamma) { return {Kind::smoothing, gamma}; }
  static Observable norm() { return {Kind::l2_norm, 0.0}; }
  std::string label() const;
};

struct EvolutionConfig {
  double dt = 0.05;
  double t_max = 1.0;
  Scheme scheme = Scheme::strang_split;
  int record_every = 1;
  std::vector<Observable> observables;
  /// Krylov dimension: 10 for the split remainder, 30 for the full exponential.
  int krylov_dim = 0;
  double krylov_tol = 1e-10;
  /// Per-step growth allowed before aborting: |u_{k+1}| <= |u_k| (1 + growth_tol).
  double growth_tol = 1e-9;
  /// Local-energy recording stops once this fraction of |u|^2 sits in the
  /// outer `boundary_layer` fraction of the box.
  double wrap_threshold = 1e-6;
  double boundary_layer = 0.1;
  /// End the run at the first wrap detection instead of continuing.
  bool stop_on_wrap = false;
};

void validate(const EvolutionConfig& cfg);

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;
};

struct EvolutionResult {
  explicit EvolutionResult(ComplexField state) : final_state(std::move(state)) {}

  ComplexField final_state;
  double t_final = 0.0;
  int steps = 0;
  std::vector<DecaySeries> series;  // one per observable, same order as cfg
  std::optional<double> wrap_time;
  double max_boundary_mass = 0.0;   // over all recorded times
  double max_step_growth = 0.0;     // max (|u_{k+1}| / |u_k| - 1)
  double max_krylov_error = 0.0;
};

/// Abort of a time integration (norm growth or non-finite state).
class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// u(t) = exp(-i t H) u0. The split scheme advances the free part exactly in
/// Fourier space and the remainder -i(P + Laplacian) - B by a Krylov
/// exponential; it requires unit weight.
EvolutionResult evolve(const DampedOperator& op, const ComplexField& u0, const EvolutionConfig& cfg);

/// |<x>^{-delta} u|
double local_energy(const ComplexField& u, double delta);
/// |<x>^{-1} <D>^{gamma/2} u|^2
double smoothing_integrand(const ComplexField& u, double gamma);

struct DecayFit {
  double slope = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least-squares slope of log(value) against log(t) over the window.
/// Fewer than 8 samples in the window is rejected.
DecayFit fit_decay_exponent(const DecaySeries& series, std::pair<double, double> t_window);

struct SmoothingResult {
  double integral = 0.0;
  double ratio = 0.0;                   // integral / |u0|^2
  double final_quarter_increment = 0.0; // share of the integral gained over the last quarter
  DecaySeries integrand;
  double initial_norm_sq = 0.0;
  double t_final = 0.0;
  double max_boundary_mass = 0.0;
  double max_step_growth = 0.0;

  /// Trapezoid integral up to t, divided by |u0|^2.
  double ratio_at(double t) const;
};

SmoothingResult smoothing_integral(const DampedOperator& op, const ComplexField& u0, double gamma,
                                   EvolutionConfig cfg);

/// Trapezoid rule over a sampled series, truncated at t_end.
double trapezoid(const DecaySeries& s, double t_end);

}  // namespace dslab
