#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dslab/fit.hpp"
#include "dslab/krylov.hpp"
#include "dslab/model.hpp"

namespace dslab {

/// Thrown when a resolvent solve misses its tolerance; carries the best
/// relative residual reached.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double best_residual, int iterations)
      : std::runtime_error(what), best_residual_(best_residual), iterations_(iterations) {}
  double best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

struct SolveResult {
  ComplexField u;
  double residual = 0.0;
  int iterations = 0;
};

/// u = (H - z)^{-1} f by GMRES right-preconditioned with (|xi|^2 - z)^{-1}.
/// Accepts Im z > 0 or Re z < 0.
SolveResult solve(const DampedOperator& op, Complex z, const ComplexField& f, double tol = 1e-8,
                  int max_iters = 2000);
/// u = (H^dagger - conj(z))^{-1} f, the L^2 adjoint of the resolvent.
SolveResult solve_adjoint(const DampedOperator& op, Complex z, const ComplexField& f,
                          double tol = 1e-8, int max_iters = 2000);
/// Applies R(z)^{k}, or its adjoint, by k sequential solves; appends residuals.
ComplexField apply_resolvent_power(const DampedOperator& op, Complex z, int k,
                                   const ComplexField& f, bool adjoint, double tol, int max_iters,
                                   std::vector<double>* residuals = nullptr,
                                   int* iterations = nullptr);

/// Norm of <x>^{-delta_l} <D>^{beta_l} R^{n+1}(z) <D>^{beta_r} <x>^{-delta_r} in L^2.
struct ResolventQuery {
  Complex z{0.0, 1.0};
  int n = 0;
  double delta_left = 0.0;
  double delta_right = 0.0;
  double deriv_left = 0.0;
  double deriv_right = 0.0;
  double solver_tol = 1e-8;
  int max_iters = 2000;
  PowerIterationOptions power{};
  std::uint64_t seed = 42;
};

void validate(const ResolventQuery& q);

struct ResolventResult {
  double norm_estimate = 0.0;
  int iterations = 0;        // Lanczos steps
  int solver_iterations = 0; // summed GMRES iterations
  std::vector<double> residuals;
  bool converged = false;        // every solve met solver_tol
  bool power_converged = false;  // top Ritz value settled to power.rel_tol
  double residual_max() const;
};

ResolventResult weighted_norm(const DampedOperator& op, const ResolventQuery& q);

struct DerivativePowerReport {
  Complex z;
  std::vector<double> steps;
  std::vector<double> errors;  // |(R(z+h) - R(z)) f / h - R(z)^2 f| / |R(z)^2 f|
  std::vector<double> ratios;  // errors[i] / errors[i+1]
  double error_constant = 0.0; // mean of errors / h
  bool pass = false;           // every ratio within [8, 12]
};

DerivativePowerReport derivative_power_check(const DampedOperator& op, Complex z,
                                             std::vector<double> steps = {1e-2, 1e-3, 1e-4},
                                             std::uint64_t seed = 42, double solver_tol = 1e-12);

struct QuadraticEstimateReport {
  Complex z;
  double norm = 0.0;  // |T R(z) T^dagger| with T = <D>^{alpha/2} a
  double tolerance = 1e-6;
  int probes = 0;
  bool pass = false;
};

QuadraticEstimateReport quadratic_estimate_check(const DampedOperator& op, Complex z, int probes,
                                                 std::uint64_t seed = 42,
                                                 double solver_tol = 1e-10);

struct PerturbationExpansionReport {
  int m = 0;
  int size = 0;
  std::size_t words = 0;
  bool structure_ok = false;  // every word has the R0^{m1+1} B R_j^{..} B ... R0 shape
  double max_error = 0.0;     // |sum of words - R1^{m+1}| / |R1^{m+1}|
  double tolerance = 1e-10;
  int redraws = 0;
  bool zero_coupling_ok = false;  // B = 0 collapses the sum to R0^{m+1}
  bool pass = false;
};

PerturbationExpansionReport perturbation_expansion_check(int m, int size, std::uint64_t seed,
                                                         double tolerance = 1e-10);

enum class Regime { low, intermediate, high, sharp_low, a_priori };

Regime parse_regime(const std::string& name);
std::string to_string(Regime r);

struct SweepRow {
  Complex z;
  int n = 0;
  double delta = 0.0;
  double norm = 0.0;
  double envelope = 0.0;
  double residual_max = 0.0;
  bool converged = false;
  bool power_converged = false;
  std::string error;
};

struct SweepTable {
  Regime regime = Regime::high;
  double envelope_exponent = 0.0;
  double envelope_constant = 0.0;
  double slope = 0.0;
  double slope_r2 = 0.0;
  double max_over_min = 0.0;
  double max_envelope_ratio = 0.0;  // max norm / envelope
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  /// Use the trapping-with-damping high-frequency exponent -(n+1) alpha~ / 2.
  bool trapping = false;
  int threads = 1;
};

/// Envelope shape of the regime's bound (without its constant).
double envelope_shape(Regime r, Complex z, int n, int dim, double alpha_tilde, bool trapping);

SweepTable frequency_sweep(const DampedOperator& op, Regime regime, const ResolventQuery& q_template,
                           const std::vector<Complex>& z_list, const SweepOptions& opts = {});

}  // namespace dslab
