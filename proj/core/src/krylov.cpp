#include "dslab/krylov.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dslab {

namespace {

Complex apply_ip(const InnerProduct& ip, const ComplexField& a, const ComplexField& b) {
  return ip ? ip(a, b) : inner(a, b);
}

double ip_norm(const InnerProduct& ip, const ComplexField& a) {
  return std::sqrt(std::max(0.0, apply_ip(ip, a, a).real()));
}

// Two passes of classical Gram-Schmidt; returns the projection coefficients.
std::vector<Complex> orthogonalize(ComplexField& w, const std::vector<ComplexField>& basis,
                                   const InnerProduct& ip) {
  std::vector<Complex> h(basis.size(), Complex{});
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Complex c = apply_ip(ip, w, basis[i]);
      w.axpy(-c, basis[i]);
      h[i] += c;
    }
  }
  return h;
}

void givens(Complex a, Complex b, Complex& c, Complex& s) {
  const double na = std::abs(a);
  const double nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double r = std::hypot(na, nb);
  c = na / r;
  s = (a / na) * std::conj(b) / r;
}

}  // namespace

GmresResult gmres(const LinearMap& A, const ComplexField& b, const LinearMap& right_precond,
                  const GmresOptions& opts, const ComplexField* x0) {
  if (opts.restart < 1 || opts.max_iters < 1) throw std::invalid_argument("bad GMRES options");
  const Grid& grid = b.grid();
  GmresResult res{x0 ? *x0 : ComplexField(grid), 0.0, 0, false};
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    res.x = ComplexField(grid);
    res.converged = true;
    return res;
  }
  const auto precond = [&](const ComplexField& v) { return right_precond ? right_precond(v) : v; };

  ComplexField best = res.x;
  double best_res = std::numeric_limits<double>::infinity();
  const int m = opts.restart;

  while (true) {
    ComplexField r = b;
    if (res.iterations > 0 || x0) r -= A(res.x);
    const double beta = l2_norm(r);
    const double rel = beta / bnorm;
    if (rel < best_res) {
      best_res = rel;
      best = res.x;
    }
    if (rel <= opts.tol) {
      res.relative_residual = rel;
      res.converged = true;
      return res;
    }
    if (res.iterations >= opts.max_iters || !std::isfinite(rel)) break;

    std::vector<ComplexField> V;
    V.reserve(m + 1);
    r *= Complex(1.0 / beta);
    V.push_back(std::move(r));
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<Complex> cs(m), sn(m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g(0) = beta;
    int k = 0;
    for (; k < m && res.iterations < opts.max_iters; ++k) {
      ComplexField w = A(precond(V[k]));
      const auto h = orthogonalize(w, V, {});
      for (int i = 0; i <= k; ++i) H(i, k) = h[i];
      const double hn = l2_norm(w);
      H(k + 1, k) = hn;
      for (int i = 0; i < k; ++i) {
        const Complex t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -std::conj(sn[i]) * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      givens(H(k, k), H(k + 1, k), cs[k], sn[k]);
      H(k, k) = cs[k] * H(k, k) + sn[k] * H(k + 1, k);
      H(k + 1, k) = 0.0;
      g(k + 1) = -std::conj(sn[k]) * g(k);
      g(k) = cs[k] * g(k);
      ++res.iterations;
      const bool breakdown = hn <= 1e-14 * beta;
      if (!breakdown) {
        w *= Complex(1.0 / hn);
        V.push_back(std::move(w));
      }
      if (breakdown || std::abs(g(k + 1)) / bnorm <= 0.5 * opts.tol) {
        ++k;
        break;
      }
    }
    if (k == 0) break;
    const Eigen::VectorXcd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    ComplexField update(grid);
    for (int i = 0; i < k; ++i) update.axpy(y(i), V[i]);
    res.x += precond(update);
  }

  res.x = best;
  res.relative_residual = best_res;
  res.converged = false;
  return res;
}

KrylovExpResult krylov_expm(const LinearMap& A, const ComplexField& v, Complex tau, int m_max,
                            const InnerProduct& ip, double stop_tol) {
  if (m_max < 1) throw std::invalid_argument("Krylov dimension must be positive");
  const Grid& grid = v.grid();
  const double beta = ip_norm(ip, v);
  KrylovExpResult out{ComplexField(grid), 0.0, 0};
  if (beta == 0.0) return out;

  std::vector<ComplexField> V;
  V.reserve(m_max + 1);
  V.push_back(Complex(1.0 / beta) * v);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m_max + 1, m_max);
  int m = 0;
  double h_next = 0.0;
  const double scale = std::abs(tau);
  for (; m < m_max; ++m) {
    ComplexField w = A(V[m]);
    const auto h = orthogonalize(w, V, ip);
    for (int i = 0; i <= m; ++i) H(i, m) = h[i];
    h_next = ip_norm(ip, w);
    H(m + 1, m) = h_next;
    if (h_next * scale <= 1e-14) {
      ++m;
      h_next = 0.0;
      break;
    }
    if (stop_tol > 0.0 && m + 1 < m_max) {
      const Eigen::MatrixXcd Em = (tau * H.topLeftCorner(m + 1, m + 1)).exp();
      if (beta * h_next * scale * std::abs(Em(m, 0)) <= stop_tol) {
        ++m;
        break;
      }
    }
    w *= Complex(1.0 / h_next);
    V.push_back(std::move(w));
  }
  out.dimension = m;
  const Eigen::MatrixXcd E = (tau * H.topLeftCorner(m, m)).exp();
  for (int i = 0; i < m; ++i) out.value.axpy(beta * E(i, 0), V[i]);
  out.error_estimate = beta * h_next * scale * std::abs(E(m - 1, 0));
  return out;
}

KrylovExpResult krylov_expm_adaptive(const LinearMap& A, const ComplexField& v, Complex tau,
                                     int m_max, double tol, const InnerProduct& ip,
                                     int max_substeps) {
  const double vnorm = ip_norm(ip, v);
  int pieces = 1;
  while (true) {
    ComplexField cur = v;
    double total_err = 0.0;
    int dim = 0;
    bool ok = true;
    for (int p = 0; p < pieces; ++p) {
      const double budget = tol * std::max(vnorm, 1e-300) / pieces;
      auto r = krylov_expm(A, cur, tau / static_cast<double>(pieces), m_max, ip, 0.5 * budget);
      if (r.error_estimate > budget) {
        ok = false;
        break;
      }
      total_err += r.error_estimate;
      dim = std::max(dim, r.dimension);
      cur = std::move(r.value);
    }
    if (ok) return {std::move(cur), total_err, dim};
    if (pieces >= max_substeps) {
      throw std::runtime_error("Krylov exponential failed to reach its tolerance");
    }
    pieces *= 2;
  }
}

PowerIterationResult largest_eigenvalue(const LinearMap& hermitian_map, const ComplexField& start,
                                        const PowerIterationOptions& opts) {
  PowerIterationResult res;
  const double n0 = l2_norm(start);
  if (n0 == 0.0) throw std::invalid_argument("largest_eigenvalue needs a nonzero start vector");
  ComplexField v = Complex(1.0 / n0) * start;
  ComplexField v_prev(v.grid());
  std::vector<double> alpha, beta;
  double prev = -1.0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    ComplexField w = hermitian_map(v);
    const double a = inner(v, w).real();
    const double b_prev = beta.empty() ? 0.0 : beta.back();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= a * v[i] + b_prev * v_prev[i];
    const double b = l2_norm(w);
    alpha.push_back(a);
    beta.push_back(b);

    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double theta = tri.eigenvalues()(m - 1);
    const double bound = b * std::abs(tri.eigenvectors()(m - 1, m - 1));
    res.eigenvalue = theta;
    res.iterations = it;
    res.residual_bound = bound;

    const double scale = std::max(std::abs(theta), 1e-300);
    // b ~ 0: the Krylov space is invariant and theta is exact.
    if (b <= 1e-14 * scale ||
        (prev >= 0.0 && std::abs(theta - prev) <= opts.rel_tol * scale && bound <= opts.rel_tol * scale)) {
      res.converged = true;
      return res;
    }
    prev = theta;
    v_prev = std::move(v);
    v = Complex(1.0 / b) * w;
  }
  return res;
}

}  // namespace dslab
