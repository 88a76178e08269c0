#include "dslab/resolvent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "dslab/parallel.hpp"

namespace dslab {

namespace {

void check_spectral_parameter(Complex z) {
  if (!(z.imag() > 0.0 || z.real() < 0.0)) {
    std::ostringstream msg;
    msg << "spectral parameter z = " << z << " must have Im z > 0 or Re z < 0";
    throw std::invalid_argument(msg.str());
  }
}

MultiplierTable free_resolvent_table(const Grid& grid, Complex z) {
  const auto k2 = grid.frequency_squared();
  std::vector<Complex> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (k2[i] - z);
  return MultiplierTable(grid, std::move(v), "(|xi|^2 - z)^-1");
}

SolveResult run_solve(const LinearMap& A, const MultiplierTable& precond, const ComplexField& f,
                      double tol, int max_iters, Complex z) {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  const LinearMap M = [&precond](const ComplexField& v) { return apply_multiplier(v, precond); };
  GmresOptions opts;
  opts.tol = tol;
  opts.max_iters = max_iters;
  auto r = gmres(A, f, M, opts);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "resolvent solve at z = " << z << " stalled at relative residual " << r.relative_residual
        << " after " << r.iterations << " iterations (tol " << tol << ")";
    throw SolverError(msg.str(), r.relative_residual, r.iterations);
  }
  return {std::move(r.x), r.relative_residual, r.iterations};
}

}  // namespace

SolveResult solve(const DampedOperator& op, Complex z, const ComplexField& f, double tol,
                  int max_iters) {
  check_spectral_parameter(z);
  const LinearMap A = [&op, z](const ComplexField& v) {
    ComplexField out = op.apply_H(v);
    out.axpy(-z, v);
    return out;
  };
  return run_solve(A, free_resolvent_table(op.grid(), z), f, tol, max_iters, z);
}

SolveResult solve_adjoint(const DampedOperator& op, Complex z, const ComplexField& f, double tol,
                          int max_iters) {
  check_spectral_parameter(z);
  const Complex zc = std::conj(z);
  const LinearMap A = [&op, zc](const ComplexField& v) {
    ComplexField out = op.apply_H_adjoint(v);
    out.axpy(-zc, v);
    return out;
  };
  return run_solve(A, free_resolvent_table(op.grid(), zc), f, tol, max_iters, z);
}

ComplexField apply_resolvent_power(const DampedOperator& op, Complex z, int k,
                                   const ComplexField& f, bool adjoint, double tol, int max_iters,
                                   std::vector<double>* residuals, int* iterations) {
  ComplexField cur = f;
  for (int i = 0; i < k; ++i) {
    auto r = adjoint ? solve_adjoint(op, z, cur, tol, max_iters) : solve(op, z, cur, tol, max_iters);
    if (residuals) residuals->push_back(r.residual);
    if (iterations) *iterations += r.iterations;
    cur = std::move(r.u);
  }
  return cur;
}

void validate(const ResolventQuery& q) {
  check_spectral_parameter(q.z);
  if (q.n < 0) throw std::invalid_argument("resolvent power index n must be >= 0");
  if (q.delta_left < 0.0 || q.delta_right < 0.0) throw std::invalid_argument("weights need delta >= 0");
  if (q.deriv_left < 0.0 || q.deriv_right < 0.0 || q.deriv_left + q.deriv_right > 2.0) {
    throw std::invalid_argument("derivative insertions need beta >= 0 and beta_l + beta_r <= 2");
  }
  if (!(q.solver_tol > 0.0 && q.solver_tol <= 1e-2)) {
    throw std::invalid_argument("solver_tol must lie in (0, 1e-2]");
  }
}

double ResolventResult::residual_max() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

ResolventResult weighted_norm(const DampedOperator& op, const ResolventQuery& q) {
  validate(q);
  const Grid& grid = op.grid();
  const auto wl = weight_table(grid, -q.delta_left);
  const auto wr = weight_table(grid, -q.delta_right);
  const MultiplierTable dl = bessel_table(grid, q.deriv_left);
  const MultiplierTable dr = bessel_table(grid, q.deriv_right);

  ResolventResult res;
  const auto sandwich = [&](const ComplexField& v, bool adjoint) {
    ComplexField cur = v;
    const auto& w_in = adjoint ? wl : wr;
    const auto& w_out = adjoint ? wr : wl;
    const auto& d_in = adjoint ? dl : dr;
    const auto& d_out = adjoint ? dr : dl;
    const double b_in = adjoint ? q.deriv_left : q.deriv_right;
    const double b_out = adjoint ? q.deriv_right : q.deriv_left;
    scale_in_place(cur, w_in);
    if (b_in != 0.0) cur = apply_multiplier(cur, d_in);
    cur = apply_resolvent_power(op, q.z, q.n + 1, cur, adjoint, q.solver_tol, q.max_iters,
                                &res.residuals, &res.solver_iterations);
    if (b_out != 0.0) cur = apply_multiplier(cur, d_out);
    scale_in_place(cur, w_out);
    return cur;
  };
  const LinearMap MtM = [&](const ComplexField& v) { return sandwich(sandwich(v, false), true); };

  std::mt19937_64 rng(q.seed);
  auto p = largest_eigenvalue(MtM, random_field(grid, rng), q.power);
  res.norm_estimate = std::sqrt(std::max(0.0, p.eigenvalue));
  res.iterations = p.iterations;
  res.power_converged = p.converged;
  res.converged = res.residual_max() <= q.solver_tol;
  return res;
}

DerivativePowerReport derivative_power_check(const DampedOperator& op, Complex z,
                                             std::vector<double> steps, std::uint64_t seed,
                                             double solver_tol) {
  if (steps.empty()) throw std::invalid_argument("derivative check needs at least one step");
  for (double h : steps) {
    if (!(h > 0.0 && h < z.imag())) {
      throw std::invalid_argument("derivative check needs Im z > h > 0");
    }
  }
  std::mt19937_64 rng(seed);
  const ComplexField f = random_field(op.grid(), rng);
  const ComplexField u0 = solve(op, z, f, solver_tol).u;
  const ComplexField r2 = solve(op, z, u0, solver_tol).u;
  const double r2n = l2_norm(r2);

  DerivativePowerReport rep;
  rep.z = z;
  rep.steps = steps;
  double acc = 0.0;
  for (double h : steps) {
    ComplexField dd = solve(op, z + h, f, solver_tol).u;
    dd -= u0;
    dd *= Complex(1.0 / h);
    dd -= r2;
    const double err = l2_norm(dd) / r2n;
    rep.errors.push_back(err);
    acc += err / h;
  }
  rep.error_constant = acc / static_cast<double>(steps.size());
  rep.pass = true;
  for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i) {
    const double ratio = rep.errors[i] / rep.errors[i + 1];
    rep.ratios.push_back(ratio);
    if (!(ratio >= 8.0 && ratio <= 12.0)) rep.pass = false;
  }
  return rep;
}

QuadraticEstimateReport quadratic_estimate_check(const DampedOperator& op, Complex z, int probes,
                                                 std::uint64_t seed, double solver_tol) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("quadratic estimate needs Im z > 0");
  if (probes < 1) throw std::invalid_argument("quadratic estimate needs at least one probe");
  QuadraticEstimateReport rep;
  rep.z = z;
  rep.probes = probes;
  if (!op.has_damping()) {
    rep.pass = true;
    return rep;
  }
  const Grid& grid = op.grid();
  const MultiplierTable half = bessel_table(grid, 0.5 * op.alpha());
  const auto a = op.damping_profile();
  const auto T = [&](ComplexField v) {
    scale_in_place(v, a);
    return apply_multiplier(v, half);
  };
  const auto T_adj = [&](const ComplexField& v) {
    ComplexField out = apply_multiplier(v, half);
    scale_in_place(out, a);
    return out;
  };
  const LinearMap MtM = [&](const ComplexField& v) {
    ComplexField x = T(solve(op, z, T_adj(v), solver_tol).u);
    return T(solve_adjoint(op, z, T_adj(x), solver_tol).u);
  };
  std::mt19937_64 rng(seed);
  PowerIterationOptions popts;
  popts.rel_tol = 1e-8;
  popts.max_iters = 500;
  for (int p = 0; p < probes; ++p) {
    auto r = largest_eigenvalue(MtM, random_field(grid, rng), popts);
    rep.norm = std::max(rep.norm, std::sqrt(std::max(0.0, r.eigenvalue)));
  }
  rep.pass = rep.norm <= 1.0 + rep.tolerance;
  return rep;
}

namespace {

enum Letter : char { kR0 = 'A', kB = 'B', kR1 = 'C' };

struct Word {
  std::string letters;
  double coefficient = 1.0;
};

std::vector<Word> expand_words(int m) {
  const std::vector<Word> factor = {{"A", 1.0}, {"ABA", -1.0}, {"ABCBA", 1.0}};
  std::vector<Word> words = {{"", 1.0}};
  for (int k = 0; k <= m; ++k) {
    std::vector<Word> next;
    next.reserve(words.size() * 3);
    for (const auto& w : words) {
      for (const auto& f : factor) next.push_back({w.letters + f.letters, w.coefficient * f.coefficient});
    }
    words = std::move(next);
  }
  return words;
}

// R0^{m1+1} B R_{j2}^{m2+1} B ... B R0^{mk+1}, sum m_l <= m, R1 blocks of length 1.
bool has_expansion_shape(const std::string& w, int m) {
  std::vector<std::string> blocks;
  std::string cur;
  for (char c : w) {
    if (c == kB) {
      blocks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  blocks.push_back(cur);
  int excess = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.empty()) return false;
    if (b.find_first_not_of(b[0]) != std::string::npos) return false;
    const bool end = i == 0 || i + 1 == blocks.size();
    if (b[0] == kR1) {
      if (end || b.size() != 1) return false;
    }
    excess += static_cast<int>(b.size()) - 1;
  }
  return excess <= m;
}

Eigen::MatrixXcd evaluate_sum(const std::vector<Word>& words, const Eigen::MatrixXcd& R0,
                              const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& R1) {
  const auto n = R0.rows();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& w : words) {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(n, n);
    for (char c : w.letters) prod = prod * (c == kR0 ? R0 : c == kB ? B : R1);
    total += w.coefficient * prod;
  }
  return total;
}

double condition_number(const Eigen::MatrixXcd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

}  // namespace

PerturbationExpansionReport perturbation_expansion_check(int m, int size, std::uint64_t seed,
                                                         double tolerance) {
  if (m < 0 || m > 4) throw std::invalid_argument("expansion order m must lie in [0, 4]");
  if (size < 1 || size > 32) throw std::invalid_argument("matrix size must lie in [1, 32]");
  PerturbationExpansionReport rep;
  rep.m = m;
  rep.size = size;
  rep.tolerance = tolerance;
  const Complex z(0.3, 1.0);
  const auto words = expand_words(m);
  rep.words = words.size();
  rep.structure_ok = std::all_of(words.begin(), words.end(),
                                 [m](const Word& w) { return has_expansion_shape(w.letters, m); });

  Eigen::MatrixXcd H0, B;
  std::uint64_t draw_seed = seed;
  const double scale = 1.0 / std::sqrt(static_cast<double>(size));
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(size, size);
  while (true) {
    std::mt19937_64 rng(draw_seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd X(size, size), Y(size, size);
    for (int i = 0; i < size; ++i) {
      for (int j = 0; j < size; ++j) {
        X(i, j) = Complex(nd(rng), nd(rng));
        Y(i, j) = Complex(nd(rng), nd(rng));
      }
    }
    H0 = 0.5 * scale * (X + X.adjoint());
    B = 0.5 * scale * Y;
    if (condition_number(H0 - z * I) < 1e8 && condition_number(H0 + B - z * I) < 1e8) break;
    ++rep.redraws;
    ++draw_seed;
    if (rep.redraws > 100) throw std::runtime_error("could not draw well-conditioned matrices");
  }
  const Eigen::MatrixXcd R0 = (H0 - z * I).inverse();
  const Eigen::MatrixXcd R1 = (H0 + B - z * I).inverse();
  Eigen::MatrixXcd target = I;
  for (int k = 0; k <= m; ++k) target = target * R1;
  const Eigen::MatrixXcd sum = evaluate_sum(words, R0, B, R1);
  rep.max_error = (sum - target).norm() / target.norm();

  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(size, size);
  Eigen::MatrixXcd r0_power = I;
  for (int k = 0; k <= m; ++k) r0_power = r0_power * R0;
  const Eigen::MatrixXcd free_sum = evaluate_sum(words, R0, zero, R0);
  rep.zero_coupling_ok = (free_sum - r0_power).norm() <= tolerance * r0_power.norm();

  rep.pass = rep.structure_ok && rep.zero_coupling_ok && rep.max_error <= tolerance;
  return rep;
}

Regime parse_regime(const std::string& name) {
  if (name == "low") return Regime::low;
  if (name == "intermediate") return Regime::intermediate;
  if (name == "high") return Regime::high;
  if (name == "sharp_low" || name == "sharp-low") return Regime::sharp_low;
  if (name == "a_priori" || name == "a-priori") return Regime::a_priori;
  throw std::invalid_argument("unknown regime '" + name + "'");
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::low:
      return "low";
    case Regime::intermediate:
      return "intermediate";
    case Regime::high:
      return "high";
    case Regime::sharp_low:
      return "sharp_low";
    case Regime::a_priori:
      return "a_priori";
  }
  return "unknown";
}

namespace {

double envelope_exponent(Regime r, int n, int dim, double alpha_tilde, bool trapping) {
  switch (r) {
    case Regime::high:
      return trapping ? -(n + 1) * alpha_tilde / 2.0 : -(n + 1) / 2.0;
    case Regime::low:
      return dim / 2.0 - 1.0 - n;
    default:
      return 0.0;
  }
}

}  // namespace

double envelope_shape(Regime r, Complex z, int n, int dim, double alpha_tilde, bool trapping) {
  const double az = std::abs(z);
  switch (r) {
    case Regime::high:
      return std::pow(az, envelope_exponent(r, n, dim, alpha_tilde, trapping));
    case Regime::low:
      return 1.0 + std::pow(az, envelope_exponent(r, n, dim, alpha_tilde, trapping));
    case Regime::intermediate:
    case Regime::sharp_low:
      return 1.0;
    case Regime::a_priori:
      return std::pow(std::max(z.imag(), -z.real()), -(n + 1));
  }
  return 1.0;
}

SweepTable frequency_sweep(const DampedOperator& op, Regime regime, const ResolventQuery& q_template,
                           const std::vector<Complex>& z_list, const SweepOptions& opts) {
  for (Complex z : z_list) check_spectral_parameter(z);
  SweepTable table;
  table.regime = regime;
  const int dim = op.grid().dim();
  table.envelope_exponent = envelope_exponent(regime, q_template.n, dim, op.alpha_tilde(), opts.trapping);
  table.rows.resize(z_list.size());

  parallel_for(z_list.size(), opts.threads, [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.z = z_list[i];
    row.n = q_template.n;
    row.delta = q_template.delta_left;
    ResolventQuery q = q_template;
    q.z = z_list[i];
    try {
      const auto r = weighted_norm(op, q);
      row.norm = r.norm_estimate;
      row.residual_max = r.residual_max();
      row.converged = r.converged;
      row.power_converged = r.power_converged;
    } catch (const SolverError& e) {
      row.error = e.what();
      row.residual_max = e.best_residual();
      row.converged = false;
    }
  });

  std::vector<double> xs, ys;
  const SweepRow* first = nullptr;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& row : table.rows) {
    if (!row.converged) continue;
    if (!first) first = &row;
    xs.push_back(std::abs(row.z));
    ys.push_back(row.norm);
    lo = std::min(lo, row.norm);
    hi = std::max(hi, row.norm);
  }
  const double alpha_t = op.alpha_tilde();
  if (regime == Regime::a_priori) {
    table.envelope_constant = 1.0;
  } else if (first) {
    table.envelope_constant =
        first->norm / envelope_shape(regime, first->z, first->n, dim, alpha_t, opts.trapping);
  }
  for (auto& row : table.rows) {
    row.envelope = table.envelope_constant *
                   envelope_shape(regime, row.z, row.n, dim, alpha_t, opts.trapping);
    if (row.converged && row.envelope > 0.0) {
      table.max_envelope_ratio = std::max(table.max_envelope_ratio, row.norm / row.envelope);
    }
  }
  if (!xs.empty() && lo > 0.0) table.max_over_min = hi / lo;
  if (xs.size() >= 2) {
    bool distinct = false;
    for (double x : xs) distinct = distinct || x != xs.front();
    if (distinct) {
      const auto fit = fit_log_log(xs, ys);
      table.slope = fit.slope;
      table.slope_r2 = fit.r2;
    }
  }
  return table;
}

}  // namespace dslab
