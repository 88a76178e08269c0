#include "dslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dslab/diagnostics.hpp"

namespace dslab {

namespace {

double gaussian_term(const MetricSpec& m, double r2) {
  return m.amplitude * std::exp(-r2 / (m.width * m.width));
}

// Multilinear interpolation of per-point values on a periodic table grid;
// points outside the table box get `outside`.
void interpolate_table(const Grid& g, std::span<const double> table, int ncomp,
                       std::span<const double> x, std::span<double> out,
                       std::span<const double> outside) {
  const int d = g.dim();
  const double h = g.spacing();
  const double L = g.half_length();
  for (int a = 0; a < d; ++a) {
    if (x[a] < -L || x[a] > L - h) {
      std::copy(outside.begin(), outside.end(), out.begin());
      return;
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<int> lo(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    const double t = (x[a] + L) / h;
    lo[a] = std::min(static_cast<int>(std::floor(t)), g.n_per_axis() - 2);
    frac[a] = t - lo[a];
  }
  for (int corner = 0; corner < (1 << d); ++corner) {
    double wgt = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const int bit = (corner >> a) & 1;
      wgt *= bit ? frac[a] : 1.0 - frac[a];
      flat += static_cast<std::size_t>(lo[a] + bit) * g.stride(a);
    }
    if (wgt == 0.0) continue;
    for (int c = 0; c < ncomp; ++c) out[c] += wgt * table[flat * ncomp + c];
  }
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool cholesky_ok(std::vector<double> m, int d) {
  for (int j = 0; j < d; ++j) {
    double s = m[j * d + j];
    for (int k = 0; k < j; ++k) s -= m[j * d + k] * m[j * d + k];
    if (!(s > 0.0)) return false;
    const double ljj = std::sqrt(s);
    m[j * d + j] = ljj;
    for (int i = j + 1; i < d; ++i) {
      double t = m[i * d + j];
      for (int k = 0; k < j; ++k) t -= m[i * d + k] * m[j * d + k];
      m[i * d + j] = t / ljj;
    }
  }
  return true;
}

double determinant(std::vector<double> m, int d) {
  double det = 1.0;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r) {
      if (std::abs(m[r * d + c]) > std::abs(m[piv * d + c])) piv = r;
    }
    if (m[piv * d + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < d; ++k) std::swap(m[c * d + k], m[piv * d + k]);
      det = -det;
    }
    det *= m[c * d + c];
    for (int r = c + 1; r < d; ++r) {
      const double f = m[r * d + c] / m[c * d + c];
      for (int k = c; k < d; ++k) m[r * d + k] -= f * m[c * d + k];
    }
  }
  return det;
}

std::string format_point(std::span<const double> x) {
  std::ostringstream s;
  s << '(';
  for (std::size_t a = 0; a < x.size(); ++a) s << (a ? ", " : "") << x[a];
  s << ')';
  return s.str();
}

}  // namespace

double MetricSpec::conformal_factor(double r2) const {
  switch (kind) {
    case MetricKind::identity:
      return 1.0;
    case MetricKind::conformal_bump:
      return 1.0 + gaussian_term(*this, r2);
    case MetricKind::trapping_well:
      return 1.0 / (1.0 + gaussian_term(*this, r2));
    case MetricKind::user_table:
      break;
  }
  throw std::logic_error("conformal factor requested for a tabulated metric");
}

double MetricSpec::conformal_factor_slope(double r2) const {
  const double w2 = width * width;
  switch (kind) {
    case MetricKind::identity:
      return 0.0;
    case MetricKind::conformal_bump:
      return -gaussian_term(*this, r2) / w2;
    case MetricKind::trapping_well: {
      const double e = gaussian_term(*this, r2);
      return e / (w2 * (1.0 + e) * (1.0 + e));
    }
    case MetricKind::user_table:
      break;
  }
  throw std::logic_error("conformal slope requested for a tabulated metric");
}

void MetricSpec::matrix_at(std::span<const double> x, std::span<double> out) const {
  const int d = static_cast<int>(x.size());
  if (kind == MetricKind::user_table) {
    if (!table_grid) throw std::invalid_argument("user_table metric without a table grid");
    std::vector<double> identity(static_cast<std::size_t>(d) * d, 0.0);
    for (int a = 0; a < d; ++a) identity[a * d + a] = 1.0;
    interpolate_table(*table_grid, table, d * d, x, out, identity);
    return;
  }
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double c = conformal_factor(r2);
  std::fill(out.begin(), out.begin() + d * d, 0.0);
  for (int a = 0; a < d; ++a) out[a * d + a] = c;
}

void MetricSpec::gradient_at(std::span<const double> x, int axis, std::span<double> out) const {
  const int d = static_cast<int>(x.size());
  if (kind != MetricKind::user_table) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double dc = 2.0 * x[axis] * conformal_factor_slope(r2);
    std::fill(out.begin(), out.begin() + d * d, 0.0);
    for (int a = 0; a < d; ++a) out[a * d + a] = dc;
    return;
  }
  const double step = 1e-5;
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  xp[axis] += step;
  xm[axis] -= step;
  std::vector<double> gp(d * d), gm(d * d);
  matrix_at(xp, gp);
  matrix_at(xm, gm);
  for (int i = 0; i < d * d; ++i) out[i] = (gp[i] - gm[i]) / (2.0 * step);
}

double DampingSpec::value_at(std::span<const double> x) const {
  switch (kind) {
    case DampingKind::none:
      return 0.0;
    case DampingKind::gaussian: {
      double r2 = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        const double c = center.empty() ? 0.0 : center[a];
        r2 += (x[a] - c) * (x[a] - c);
      }
      return amplitude * std::exp(-r2 / (width * width));
    }
    case DampingKind::annulus: {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      const double dr = std::sqrt(r2) - radius;
      return amplitude * std::exp(-dr * dr / (width * width));
    }
    case DampingKind::user_table: {
      if (!table_grid) throw std::invalid_argument("user_table damping without a table grid");
      double out = 0.0;
      const double zero = 0.0;
      interpolate_table(*table_grid, table, 1, x, std::span<double>(&out, 1),
                        std::span<const double>(&zero, 1));
      return out;
    }
  }
  return 0.0;
}

double alpha_tilde(double alpha) noexcept { return std::min(1.0, alpha); }

int kappa_for_dimension(int dim) noexcept { return dim % 2 == 0 ? dim / 2 : (dim + 1) / 2; }

double DampedOperator::alpha_tilde() const noexcept { return dslab::alpha_tilde(damping_.alpha); }

int DampedOperator::kappa() const noexcept { return kappa_for_dimension(grid_.dim()); }

DampedOperator::DampedOperator(Grid grid, MetricSpec metric, DampingSpec damping,
                               WeightChoice w_choice)
    : grid_(grid),
      metric_(std::move(metric)),
      damping_(std::move(damping)),
      w_choice_(w_choice),
      laplacian_(bessel_table(grid, 0.0)),
      bessel_alpha_(bessel_table(grid, damping_.alpha)) {}

DampedOperator assemble(const Grid& grid, const MetricSpec& metric, const DampingSpec& damping,
                        WeightChoice w_choice, std::vector<ComplexField> b_coeffs) {
  const int d = grid.dim();
  const std::size_t n = grid.size();
  if (metric.kind == MetricKind::user_table) {
    if (!metric.table_grid) throw std::invalid_argument("user_table metric needs a table grid");
    if (metric.table.size() != metric.table_grid->size() * d * d) {
      throw std::invalid_argument("user_table metric has the wrong number of entries");
    }
  }
  if (!(metric.width > 0.0)) throw std::invalid_argument("metric width must be positive");
  if (!(metric.rho > 0.0)) throw std::invalid_argument("metric decay rate rho must be positive");
  if (!(damping.rho > 0.0)) throw std::invalid_argument("damping decay rate rho must be positive");
  if (damping.kind != DampingKind::none && !(damping.width > 0.0)) {
    throw std::invalid_argument("damping width must be positive");
  }
  if (!damping.center.empty() && static_cast<int>(damping.center.size()) != d) {
    throw std::invalid_argument("damping center has the wrong dimension");
  }

  DampedOperator op(grid, metric, damping, w_choice);
  op.laplacian_ = MultiplierTable(grid, laplacian_symbol());

  std::vector<double> x(d);
  std::vector<double> gmat(static_cast<std::size_t>(d) * d);
  std::vector<double> grad(static_cast<std::size_t>(d) * d);

  // Per-point metric, SPD check, Beltrami weight.
  op.w_.assign(n, 1.0);
  const bool conformal = metric.is_conformal();
  if (conformal) {
    op.wc_.resize(n);
  } else {
    op.wg_.resize(n * d * d);
  }
  HypothesisAudit& audit = op.audit_;
  double metric_edge = 0.0;
  double metric_bulk = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    grid.point(i, x);
    metric.matrix_at(x, gmat);
    if (!cholesky_ok(gmat, d)) {
      throw std::invalid_argument("metric is not positive definite at x = " + format_point(x));
    }
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double bracket = std::sqrt(1.0 + r2);
    if (w_choice == WeightChoice::beltrami) {
      const double det = determinant(gmat, d);
      op.w_[i] = 1.0 / std::sqrt(det);
      if (std::sqrt(r2) > 0.75 * grid.half_length()) {
        audit.beltrami_far_deviation = std::max(audit.beltrami_far_deviation, std::abs(op.w_[i] - 1.0));
      }
    }
    if (conformal) {
      op.wc_[i] = op.w_[i] * gmat[0];
    } else {
      for (int c = 0; c < d * d; ++c) op.wg_[i * d * d + c] = op.w_[i] * gmat[c];
    }
    double dev = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const double e = gmat[a * d + b] - (a == b ? 1.0 : 0.0);
        dev += e * e;
      }
    }
    const double ratio = std::sqrt(dev) * std::pow(bracket, metric.rho);
    audit.metric_decay = std::max(audit.metric_decay, ratio);
    if (std::sqrt(r2) > 0.9 * grid.half_length()) {
      metric_edge = std::max(metric_edge, ratio);
    } else {
      metric_bulk = std::max(metric_bulk, ratio);
    }
    double gnorm = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      metric.gradient_at(x, axis, grad);
      for (double v : grad) gnorm += v * v;
    }
    audit.metric_gradient_decay =
        std::max(audit.metric_gradient_decay, std::sqrt(gnorm) * std::pow(bracket, metric.rho + 1.0));
  }
  op.unit_weight_ = std::all_of(op.w_.begin(), op.w_.end(), [](double v) { return v == 1.0; });
  op.inv_w_.resize(n);
  for (std::size_t i = 0; i < n; ++i) op.inv_w_[i] = 1.0 / op.w_[i];
  if (w_choice == WeightChoice::beltrami && audit.beltrami_far_deviation > 1e-6) {
    audit.warnings.push_back("Beltrami weight |g|^{1/2} deviates from 1 far from the origin");
  }
  if (metric_edge > metric_bulk && metric_edge > 1e-12) {
    audit.warnings.push_back("metric long-range ratio peaks near the box edge");
  }

  // Damping profile.
  op.a_.assign(n, 0.0);
  double damping_edge = 0.0;
  double damping_bulk = 0.0;
  const double fd = 1e-4;
  for (std::size_t i = 0; i < n; ++i) {
    grid.point(i, x);
    const double a = damping.value_at(x);
    if (a < 0.0) {
      throw std::invalid_argument("damping coefficient is negative at x = " + format_point(x));
    }
    op.a_[i] = a;
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double bracket = std::sqrt(1.0 + r2);
    const double ratio = a * std::pow(bracket, 1.0 + damping.rho);
    audit.damping_decay = std::max(audit.damping_decay, ratio);
    if (std::sqrt(r2) > 0.9 * grid.half_length()) {
      damping_edge = std::max(damping_edge, ratio);
    } else {
      damping_bulk = std::max(damping_bulk, ratio);
    }
    if (damping.kind != DampingKind::none) {
      double g2 = 0.0;
      for (int axis = 0; axis < d; ++axis) {
        auto xp = x;
        auto xm = x;
        xp[axis] += fd;
        xm[axis] -= fd;
        const double da = (damping.value_at(xp) - damping.value_at(xm)) / (2.0 * fd);
        g2 += da * da;
      }
      audit.damping_gradient_decay =
          std::max(audit.damping_gradient_decay, std::sqrt(g2) * std::pow(bracket, 2.0 + damping.rho));
    }
  }
  if (damping_edge > damping_bulk && damping_edge > 1e-12) {
    audit.warnings.push_back("damping short-range ratio peaks near the box edge");
  }
  op.damped_ = norm_inf(op.a_) > 0.0;

  op.flat_ = op.unit_weight_;
  if (conformal) {
    for (double v : op.wc_) {
      if (v != 1.0) {
        op.flat_ = false;
        break;
      }
    }
  } else {
    op.flat_ = false;
  }

  if (!b_coeffs.empty()) {
    if (static_cast<int>(b_coeffs.size()) != d) {
      throw std::invalid_argument("first-order term needs exactly one coefficient per axis");
    }
    for (const auto& b : b_coeffs) {
      if (!(b.grid() == grid)) throw std::invalid_argument("first-order coefficient on another grid");
    }
    op.b_ = std::move(b_coeffs);
    op.flat_ = false;
    const auto defects = hermiticity_defects(op, 4, 20240611);
    if (defects.P > 1e-10) {
      throw std::invalid_argument("P + W fails the symmetry audit in the w-weighted product");
    }
  }

  for (const auto& msg : audit.warnings) warn(msg);
  return op;
}

ComplexField DampedOperator::divergence_form(const ComplexField& f, bool subtract_identity) const {
  const int d = grid_.dim();
  const std::size_t n = grid_.size();
  ComplexField spectrum = forward_transform(f);
  const auto freqs = grid_.axis_frequencies();

  std::vector<ComplexField> grads;
  grads.reserve(d);
  for (int k = 0; k < d; ++k) {
    ComplexField g = spectrum;
    auto v = g.values();
    for (std::size_t i = 0; i < n; ++i) v[i] *= freqs[grid_.axis_index(i, k)];
    grid_.inverse_fft(v);
    grads.push_back(std::move(g));
  }

  ComplexField acc(grid_);
  auto accv = acc.values();
  ComplexField flux(grid_);
  auto fv = flux.values();
  for (int j = 0; j < d; ++j) {
    if (wg_.empty()) {
      const auto gj = grads[j].values();
      for (std::size_t i = 0; i < n; ++i) {
        const double coef = subtract_identity ? wc_[i] - 1.0 : wc_[i];
        fv[i] = coef * gj[i];
      }
    } else {
      std::fill(fv.begin(), fv.end(), Complex{});
      for (int k = 0; k < d; ++k) {
        const auto gk = grads[k].values();
        for (std::size_t i = 0; i < n; ++i) {
          double coef = wg_[i * d * d + j * d + k];
          if (subtract_identity && j == k) coef -= 1.0;
          fv[i] += coef * gk[i];
        }
      }
    }
    grid_.forward_fft(fv);
    for (std::size_t i = 0; i < n; ++i) accv[i] += freqs[grid_.axis_index(i, j)] * fv[i];
  }
  grid_.inverse_fft(accv);
  return acc;
}

ComplexField DampedOperator::apply_first_order(const ComplexField& f, bool adjoint) const {
  ComplexField out(grid_);
  if (b_.empty()) return out;
  const int d = grid_.dim();
  const auto freqs = grid_.axis_frequencies();
  if (!adjoint) {
    const ComplexField spectrum = forward_transform(f);
    for (int j = 0; j < d; ++j) {
      ComplexField g = spectrum;
      auto v = g.values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= freqs[grid_.axis_index(i, j)];
      grid_.inverse_fft(v);
      const auto b = b_[j].values();
      for (std::size_t i = 0; i < v.size(); ++i) out[i] += b[i] * v[i];
    }
    return out;
  }
  // W^dagger f = sum_j D_j (conj(b_j) f)
  ComplexField acc(grid_);
  for (int j = 0; j < d; ++j) {
    ComplexField g = f;
    const auto b = b_[j].values();
    auto v = g.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::conj(b[i]);
    grid_.forward_fft(v);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += freqs[grid_.axis_index(i, j)] * v[i];
  }
  grid_.inverse_fft(acc.values());
  return acc;
}

ComplexField DampedOperator::apply_P(const ComplexField& f) const {
  if (flat_) return apply_multiplier(f, laplacian_);
  ComplexField out = divergence_form(f, false);
  if (!unit_weight_) scale_in_place(out, inv_w_);
  if (!b_.empty()) out += apply_first_order(f, false);
  return out;
}

ComplexField DampedOperator::apply_metric_correction(const ComplexField& f) const {
  if (flat_) return ComplexField(grid_);
  if (unit_weight_) {
    ComplexField out = divergence_form(f, true);
    if (!b_.empty()) out += apply_first_order(f, false);
    return out;
  }
  ComplexField out = apply_P(f);
  out -= apply_multiplier(f, laplacian_);
  return out;
}

ComplexField DampedOperator::apply_P_adjoint(const ComplexField& f) const {
  if (flat_) return apply_multiplier(f, laplacian_);
  ComplexField out = f;
  if (!unit_weight_) scale_in_place(out, inv_w_);
  out = divergence_form(out, false);
  if (!b_.empty()) out += apply_first_order(f, true);
  return out;
}

ComplexField DampedOperator::apply_B_with(const ComplexField& f, Complex phase) const {
  if (!damped_) return ComplexField(grid_);
  ComplexField g = f;
  auto v = g.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= phase * a_[i];
  grid_.forward_fft(v);
  multiply_in_place(v, bessel_alpha_);
  grid_.inverse_fft(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= phase * a_[i];
  return g;
}

ComplexField DampedOperator::apply_B(const ComplexField& f) const {
  return apply_B_with(f, damping_.coefficient_phase);
}

ComplexField DampedOperator::apply_B_adjoint(const ComplexField& f) const {
  return apply_B_with(f, std::conj(damping_.coefficient_phase));
}

ComplexField DampedOperator::apply_H(const ComplexField& f) const {
  ComplexField out = apply_P(f);
  if (damped_) out.axpy(Complex(0.0, -1.0), apply_B(f));
  return out;
}

ComplexField DampedOperator::apply_H_adjoint(const ComplexField& f) const {
  ComplexField out = apply_P_adjoint(f);
  if (damped_) out.axpy(Complex(0.0, 1.0), apply_B_adjoint(f));
  return out;
}

Complex DampedOperator::inner_w(const ComplexField& f, const ComplexField& g) const {
  return unit_weight_ ? inner(f, g) : inner(f, g, w_);
}

double DampedOperator::norm_w(const ComplexField& f) const {
  return unit_weight_ ? l2_norm(f) : l2_norm(f, w_);
}

ComplexField apply_P(const DampedOperator& op, const ComplexField& f) { return op.apply_P(f); }
ComplexField apply_B_alpha(const DampedOperator& op, const ComplexField& f) { return op.apply_B(f); }
ComplexField apply_H(const DampedOperator& op, const ComplexField& f) { return op.apply_H(f); }

DissipativityReport dissipativity_report(const DampedOperator& op, int n_samples,
                                         std::uint64_t seed, double tolerance) {
  if (n_samples < 1) throw std::invalid_argument("dissipativity report needs at least one sample");
  std::mt19937_64 rng(seed);
  DissipativityReport r;
  r.n_samples = n_samples;
  r.tolerance = tolerance;
  r.max_imag = -std::numeric_limits<double>::infinity();
  r.min_real = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    ComplexField f = random_field(op.grid(), rng);
    f *= 1.0 / op.norm_w(f);
    const Complex q = op.inner_w(op.apply_H(f), f);
    r.max_imag = std::max(r.max_imag, q.imag());
    r.min_real = std::min(r.min_real, q.real());
  }
  r.dissipative = r.max_imag <= tolerance;
  r.accretive = r.min_real >= -tolerance;
  return r;
}

HermiticityDefects hermiticity_defects(const DampedOperator& op, int n_pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  HermiticityDefects out;
  for (int s = 0; s < n_pairs; ++s) {
    const ComplexField f = random_field(op.grid(), rng);
    const ComplexField g = random_field(op.grid(), rng);
    const double scale_w = op.norm_w(f) * op.norm_w(g);
    const Complex pfg = op.inner_w(op.apply_P(f), g);
    const Complex pgf = op.inner_w(op.apply_P(g), f);
    out.P = std::max(out.P, std::abs(pfg - std::conj(pgf)) / scale_w);
    const double scale = l2_norm(f) * l2_norm(g);
    const Complex bfg = inner(op.apply_B(f), g);
    const Complex bgf = inner(op.apply_B(g), f);
    out.B = std::max(out.B, std::abs(bfg - std::conj(bgf)) / scale);
  }
  return out;
}

}  // namespace dslab
