#pragma once

#include <functional>
#include <optional>

#include "dslab/field.hpp"

namespace dslab {

using LinearMap = std::function<ComplexField(const ComplexField&)>;
using InnerProduct = std::function<Complex(const ComplexField&, const ComplexField&)>;

struct GmresOptions {
  double tol = 1e-8;
  int restart = 50;
  int max_iters = 2000;
};

struct GmresResult {
  ComplexField x;
  double relative_residual = 0.0;  // true residual |A x - b| / |b|
  int iterations = 0;
  bool converged = false;
};

/// Restarted GMRES for A x = b with optional right preconditioner M ~ A^{-1}.
/// Convergence is judged on the true residual after each cycle. On failure the
/// iterate with the smallest true residual is returned.
GmresResult gmres(const LinearMap& A, const ComplexField& b, const LinearMap& right_precond,
                  const GmresOptions& opts, const ComplexField* x0 = nullptr);

struct KrylovExpResult {
  ComplexField value;
  double error_estimate = 0.0;
  int dimension = 0;
};

/// exp(tau A) v from an Arnoldi basis of dimension <= m_max in the given
/// inner product. The error estimate is beta h_{m+1,m} |[exp(tau H_m)]_{m,1}|.
/// With stop_tol > 0 the basis stops growing once that estimate drops below it.
KrylovExpResult krylov_expm(const LinearMap& A, const ComplexField& v, Complex tau, int m_max,
                            const InnerProduct& ip = {}, double stop_tol = 0.0);

/// Same, but splits tau into substeps until each estimate is below tol * |v|.
KrylovExpResult krylov_expm_adaptive(const LinearMap& A, const ComplexField& v, Complex tau,
                                     int m_max, double tol, const InnerProduct& ip = {},
                                     int max_substeps = 4096);

struct PowerIterationOptions {
  double rel_tol = 1e-4;
  int max_iters = 200;
};

struct PowerIterationResult {
  double eigenvalue = 0.0;  // largest Ritz value
  int iterations = 0;
  bool converged = false;
  double residual_bound = 0.0;  // beta_j |s_j| of the top Ritz pair
};

/// Largest eigenvalue of a Hermitian nonnegative map (typically M^dagger M) by
/// a Lanczos recurrence without stored basis. The top Ritz value is never
/// below the power-iteration Rayleigh quotient from the same start, and it
/// does not stall on clusters below the top. Converged once the Ritz value
/// moves by at most rel_tol and its residual bound is at most rel_tol, both
/// relative to the value.
PowerIterationResult largest_eigenvalue(const LinearMap& hermitian_map, const ComplexField& start,
                                        const PowerIterationOptions& opts);

}  // namespace dslab
