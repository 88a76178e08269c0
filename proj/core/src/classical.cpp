#include "dslab/classical.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dslab/parallel.hpp"

namespace dslab {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_point(const PhaseSpacePoint& w) {
  if (w.x.empty() || w.x.size() != w.xi.size()) throw std::invalid_argument("phase-space point needs matching x and xi");
  for (std::size_t i = 0; i < w.x.size(); ++i) {
    if (!std::isfinite(w.x[i]) || !std::isfinite(w.xi[i])) {
      throw std::invalid_argument("phase-space point has non-finite components");
    }
  }
}

// <M xi, xi> for a row-major d x d matrix.
double quadratic_form(const std::vector<double>& m, const std::vector<double>& xi) {
  const std::size_t d = xi.size();
  double s = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) s += m[a * d + b] * xi[a] * xi[b];
  }
  return s;
}

// Hamiltonian vector field of p: dx = dp/dxi, dxi = -dp/dx.
void vector_field(const MetricSpec& metric, const std::vector<double>& x, const std::vector<double>& xi,
                  std::vector<double>& dx, std::vector<double>& dxi) {
  const std::size_t d = x.size();
  if (metric.is_conformal()) {
    const double r2 = dot(x, x);
    const double c = metric.conformal_factor(r2);
    const double slope = metric.conformal_factor_slope(r2);
    const double xi2 = dot(xi, xi);
    for (std::size_t k = 0; k < d; ++k) {
      dx[k] = 2.0 * c * xi[k];
      dxi[k] = -2.0 * x[k] * slope * xi2;
    }
    return;
  }
  std::vector<double> g(d * d);
  metric.matrix_at(x, g);
  for (std::size_t a = 0; a < d; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < d; ++b) s += g[a * d + b] * xi[b];
    dx[a] = 2.0 * s;
  }
  for (std::size_t k = 0; k < d; ++k) {
    metric.gradient_at(x, static_cast<int>(k), g);
    dxi[k] = -quadratic_form(g, xi);
  }
}

// One implicit-midpoint step by fixed-point iteration; false if the stage
// equation does not settle.
bool midpoint_step(const MetricSpec& metric, PhaseSpacePoint& w, double h, double tol) {
  const std::size_t d = w.x.size();
  std::vector<double> dx(d), dxi(d), mx(d), mxi(d);
  vector_field(metric, w.x, w.xi, dx, dxi);
  std::vector<double> nx(d), nxi(d);
  for (std::size_t k = 0; k < d; ++k) {
    nx[k] = w.x[k] + h * dx[k];
    nxi[k] = w.xi[k] + h * dxi[k];
  }
  for (int it = 0; it < 100; ++it) {
    for (std::size_t k = 0; k < d; ++k) {
      mx[k] = 0.5 * (w.x[k] + nx[k]);
      mxi[k] = 0.5 * (w.xi[k] + nxi[k]);
    }
    vector_field(metric, mx, mxi, dx, dxi);
    double change = 0.0, scale = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double ax = w.x[k] + h * dx[k];
      const double axi = w.xi[k] + h * dxi[k];
      change = std::max({change, std::abs(ax - nx[k]), std::abs(axi - nxi[k])});
      scale = std::max({scale, std::abs(ax), std::abs(axi)});
      nx[k] = ax;
      nxi[k] = axi;
    }
    if (change <= tol * scale) {
      w.x = std::move(nx);
      w.xi = std::move(nxi);
      return true;
    }
  }
  return false;
}

double radial_velocity(const MetricSpec& metric, const PhaseSpacePoint& w) {
  const std::size_t d = w.x.size();
  std::vector<double> dx(d), dxi(d);
  vector_field(metric, w.x, w.xi, dx, dxi);
  return dot(w.x, dx);
}

struct HalfRun {
  std::vector<TrajectorySample> samples;  // excludes t = 0
  std::optional<double> escape_time;
  double max_drift = 0.0;
  bool ok = true;
};

HalfRun integrate_half(const MetricSpec& metric, const PhaseSpacePoint& w0, double p0, double t_max,
                       double dt, double direction, const FlowOptions& opts) {
  HalfRun run;
  const int steps = static_cast<int>(std::ceil(t_max / dt - 1e-9));
  PhaseSpacePoint w = w0;
  for (int k = 1; k <= steps; ++k) {
    const double h = (k == steps ? t_max - (steps - 1) * dt : dt) * direction;
    if (!midpoint_step(metric, w, h, opts.stage_tol)) {
      run.ok = false;
      return run;
    }
    const double p = symbol_p(metric, w);
    const double drift = std::abs(p - p0) / p0;
    run.max_drift = std::max(run.max_drift, drift);
    if (!(drift <= opts.conservation_tol)) {
      run.ok = false;
      return run;
    }
    const double t = direction * (k == steps ? t_max : k * dt);
    const bool escaped = opts.r_escape && std::sqrt(dot(w.x, w.x)) > *opts.r_escape &&
                         direction * radial_velocity(metric, w) > 0.0;
    if (k % opts.record_every == 0 || k == steps || escaped) run.samples.push_back({t, w, p});
    if (escaped) {
      run.escape_time = t;
      break;
    }
  }
  return run;
}

}  // namespace

double symbol_p(const MetricSpec& metric, const PhaseSpacePoint& w) {
  if (metric.is_conformal()) return metric.conformal_factor(dot(w.x, w.x)) * dot(w.xi, w.xi);
  const std::size_t d = w.x.size();
  std::vector<double> g(d * d);
  metric.matrix_at(w.x, g);
  return quadratic_form(g, w.xi);
}

PhaseSpacePoint on_energy_shell(const MetricSpec& metric, PhaseSpacePoint w, double energy) {
  check_point(w);
  const double p = symbol_p(metric, w);
  if (!(p > 0.0)) throw std::invalid_argument("cannot rescale a point with p = 0 onto an energy shell");
  const double s = std::sqrt(energy / p);
  for (double& v : w.xi) v *= s;
  return w;
}

std::string to_string(FlowClass c) {
  switch (c) {
    case FlowClass::escaped:
      return "escaped";
    case FlowClass::trapped_up_to_T:
      return "trapped_up_to_T";
    case FlowClass::integrator_failure:
      return "integrator_failure";
  }
  return "unknown";
}

Trajectory flow(const MetricSpec& metric, const PhaseSpacePoint& w0, double t_max, const FlowOptions& opts) {
  check_point(w0);
  if (!(t_max > 0.0)) throw std::invalid_argument("flow needs t_max > 0");
  if (!(opts.dt > 0.0)) throw std::invalid_argument("flow needs dt > 0");
  if (opts.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  const double p0 = symbol_p(metric, w0);
  if (!(p0 > 0.0)) throw std::invalid_argument("flow needs p(w0) > 0");

  Trajectory tr;
  for (int halving = 0; halving <= opts.max_halvings; ++halving) {
    const double dt = opts.dt / std::ldexp(1.0, halving);
    tr = Trajectory{};
    tr.dt = dt;
    tr.halvings = halving;
    HalfRun fwd = integrate_half(metric, w0, p0, t_max, dt, 1.0, opts);
    HalfRun bwd;
    if (fwd.ok && opts.backward) bwd = integrate_half(metric, w0, p0, t_max, dt, -1.0, opts);
    tr.max_energy_drift = std::max(fwd.max_drift, bwd.max_drift);
    if (!fwd.ok || !bwd.ok) {
      tr.classification = FlowClass::integrator_failure;
      continue;
    }
    tr.points.reserve(fwd.samples.size() + bwd.samples.size() + 1);
    for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it) tr.points.push_back(std::move(*it));
    tr.points.push_back({0.0, w0, p0});
    for (auto& s : fwd.samples) tr.points.push_back(std::move(s));
    if (fwd.escape_time && bwd.escape_time) {
      tr.escape_time = std::abs(*bwd.escape_time) < *fwd.escape_time ? bwd.escape_time : fwd.escape_time;
    } else {
      tr.escape_time = fwd.escape_time ? fwd.escape_time : bwd.escape_time;
    }
    tr.classification = tr.escape_time ? FlowClass::escaped : FlowClass::trapped_up_to_T;
    return tr;
  }
  return tr;
}

PhaseSpacePoint flow_to(const MetricSpec& metric, const PhaseSpacePoint& w0, double t, double dt) {
  check_point(w0);
  if (!(dt > 0.0)) throw std::invalid_argument("flow needs dt > 0");
  PhaseSpacePoint w = w0;
  const int steps = static_cast<int>(std::ceil(std::abs(t) / dt - 1e-9));
  if (steps == 0) return w;
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    if (!midpoint_step(metric, w, h, 1e-15)) throw std::runtime_error("implicit midpoint stage did not converge");
  }
  return w;
}

FlowClass classify_trapped(const MetricSpec& metric, const PhaseSpacePoint& w0, double t_max,
                           double r_escape, FlowOptions opts) {
  if (!(r_escape > 0.0)) throw std::invalid_argument("r_escape must be positive");
  opts.r_escape = r_escape;
  opts.backward = true;
  // Only the classification is needed; keep the sample list short.
  opts.record_every = std::max(opts.record_every, 1000);
  return flow(metric, w0, t_max, opts).classification;
}

MetricSpec trapping_metric(double amplitude, double width) {
  MetricSpec m;
  m.kind = MetricKind::trapping_well;
  m.amplitude = amplitude;
  m.width = width;
  return m;
}

double trapping_ring_radius(const MetricSpec& metric, bool stable) {
  if (metric.kind != MetricKind::trapping_well) throw std::invalid_argument("ring radius needs a trapping_well metric");
  const double B = metric.amplitude;
  if (!(B > std::exp(2.0))) throw std::invalid_argument("trapping_well needs amplitude > e^2 for circular geodesics");
  // Circular geodesics of c(r^2)|xi|^2 sit where s (1 + B e^{-s}) is
  // stationary in s = r^2 / width^2, i.e. B e^{-s} (s - 1) = 1. The left
  // side peaks at s = 2, which separates the two roots.
  const auto g = [B](double s) { return B * std::exp(-s) * (s - 1.0) - 1.0; };
  const double lo = stable ? 1.0 : 2.0;
  const double hi = stable ? 2.0 : 4.0 + std::log(B);
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  const double s = 0.5 * (root.first + root.second);
  return metric.width * std::sqrt(s);
}

PhaseSpacePoint ring_launch(const MetricSpec& metric, int dim, bool stable) {
  if (dim < 2) throw std::invalid_argument("a ring needs dimension >= 2");
  PhaseSpacePoint w{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  w.x[0] = trapping_ring_radius(metric, stable);
  w.xi[1] = 1.0;
  return on_energy_shell(metric, w);
}

std::string to_string(GccStatus s) {
  switch (s) {
    case GccStatus::not_trapped:
      return "not_trapped";
    case GccStatus::satisfied:
      return "satisfied";
    case GccStatus::violated:
      return "violated";
    case GccStatus::undecided:
      return "undecided";
  }
  return "unknown";
}

GccReport check_damping_condition(const MetricSpec& metric, const DampingSpec& damping,
                                  const std::vector<PhaseSpacePoint>& sample, double t_max,
                                  double a_threshold, const GccOptions& opts) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  const double r_escape = opts.r_escape > 0.0 ? opts.r_escape : 4.0 * metric.width + 4.0;
  FlowOptions fo = opts.flow;
  fo.r_escape = r_escape;
  fo.backward = true;

  GccReport rep;
  rep.t_max = t_max;
  rep.classes.assign(sample.size(), FlowClass::escaped);
  rep.status.assign(sample.size(), GccStatus::not_trapped);
  parallel_for(sample.size(), opts.threads, [&](std::size_t i) {
    const PhaseSpacePoint w = on_energy_shell(metric, sample[i]);
    const Trajectory tr = flow(metric, w, t_max, fo);
    rep.classes[i] = tr.classification;
    if (tr.classification == FlowClass::integrator_failure) {
      rep.status[i] = GccStatus::undecided;
    } else if (tr.classification == FlowClass::trapped_up_to_T) {
      const bool hit = std::any_of(tr.points.begin(), tr.points.end(),
                                   [&](const TrajectorySample& s) { return damping.value_at(s.w.x) > a_threshold; });
      rep.status[i] = hit ? GccStatus::satisfied : GccStatus::violated;
    }
  });
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (rep.classes[i] == FlowClass::trapped_up_to_T) ++rep.trapped;
    switch (rep.status[i]) {
      case GccStatus::satisfied:
        ++rep.satisfied;
        break;
      case GccStatus::violated:
        ++rep.violated;
        break;
      case GccStatus::undecided:
        ++rep.undecided;
        break;
      case GccStatus::not_trapped:
        break;
    }
  }
  std::ostringstream msg;
  if (rep.trapped == 0 && rep.undecided == 0) {
    rep.verdict = GccStatus::satisfied;
    msg << "GCC vacuously satisfied (no trapped samples)";
  } else {
    rep.verdict = rep.violated > 0 ? GccStatus::violated
                  : rep.undecided > 0 ? GccStatus::undecided
                                      : GccStatus::satisfied;
    msg << "sampled GCC, finite-time surrogate at t_max = " << t_max << ": " << rep.satisfied
        << " satisfied, " << rep.violated << " violated, " << rep.undecided << " undecided; "
        << rep.trapped << " trapped of " << sample.size() << " samples";
  }
  rep.message = msg.str();
  return rep;
}

double chi_alpha(double r, double alpha) {
  if (r <= 0.0) return alpha > 0.0 ? 0.0 : std::exp(-2.0);
  return std::pow(r, 0.5 * alpha) * std::exp(-2.0 * (r - 1.0) * (r - 1.0));
}

double escape_bracket(const MetricSpec& metric, const PhaseSpacePoint& w) {
  const std::size_t d = w.x.size();
  std::vector<double> dx(d), dxi(d);
  vector_field(metric, w.x, w.xi, dx, dxi);
  // dp/dxi . d(x.xi)/dx - dp/dx . d(x.xi)/dxi = dx . xi + dxi . x
  return dot(dx, w.xi) + dot(dxi, w.x);
}

namespace {

double correction_bracket(const MetricSpec& metric, const PhaseSymbol& f, const PhaseSpacePoint& w) {
  const std::size_t d = w.x.size();
  std::vector<double> dx(d), dxi(d);
  vector_field(metric, w.x, w.xi, dx, dxi);
  const double h = 1e-6;
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    PhaseSpacePoint a = w, b = w;
    a.x[k] += h;
    b.x[k] -= h;
    s += dx[k] * (f(a) - f(b)) / (2.0 * h);
    a = w;
    b = w;
    a.xi[k] += h;
    b.xi[k] -= h;
    s += dxi[k] * (f(a) - f(b)) / (2.0 * h);
  }
  return s;
}

}  // namespace

EscapeProbeReport escape_symbol_probe(const MetricSpec& metric, const DampingSpec& damping,
                                      const PhaseSymbol& f_c, double beta,
                                      std::pair<double, double> energy_window, int n_samples, int dim,
                                      const EscapeProbeOptions& opts) {
  if (n_samples < 1) throw std::invalid_argument("escape probe needs at least one sample");
  if (dim < 1) throw std::invalid_argument("escape probe needs dim >= 1");
  if (!(energy_window.first > 0.0) || energy_window.second < energy_window.first) {
    throw std::invalid_argument("energy window must satisfy 0 < lo <= hi");
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> cube(-opts.radius, opts.radius);
  std::uniform_real_distribution<double> energy(energy_window.first, energy_window.second);
  std::normal_distribution<double> normal;
  std::vector<PhaseSpacePoint> pts(n_samples);
  for (auto& w : pts) {
    w.x.assign(dim, 0.0);
    w.xi.assign(dim, 0.0);
    do {
      for (double& v : w.x) v = cube(rng);
    } while (dot(w.x, w.x) > opts.radius * opts.radius);
    do {
      for (double& v : w.xi) v = normal(rng);
    } while (dot(w.xi, w.xi) == 0.0);
    const double e = energy_window.first == energy_window.second ? energy_window.first : energy(rng);
    w = on_energy_shell(metric, w, e);
  }

  const double alpha = damping.alpha;
  std::vector<double> values(pts.size());
  std::vector<char> chi_ok(pts.size(), 1);
  parallel_for(pts.size(), opts.threads, [&](std::size_t i) {
    const auto& w = pts[i];
    double v = escape_bracket(metric, w);
    if (f_c) v += correction_bracket(metric, f_c, w);
    if (beta != 0.0) {
      const double r = dot(w.xi, w.xi);
      const double chi = chi_alpha(r, alpha);
      if (chi > std::pow(r, 0.5 * alpha) * (1.0 + 1e-14)) chi_ok[i] = 0;
      const double a = damping.value_at(w.x);
      v += beta * a * a * chi;
    }
    values[i] = v;
  });

  EscapeProbeReport rep;
  rep.samples = n_samples;
  const auto it = std::min_element(values.begin(), values.end());
  rep.minimum = *it;
  rep.c0 = rep.minimum / 3.0;
  rep.positive = rep.minimum > 0.0;
  rep.argmin = pts[static_cast<std::size_t>(it - values.begin())];
  rep.chi_audit_ok = std::all_of(chi_ok.begin(), chi_ok.end(), [](char c) { return c != 0; });
  return rep;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  const std::size_t d = tr.points.empty() ? 0 : tr.points.front().w.x.size();
  out << 't';
  for (std::size_t k = 1; k <= d; ++k) out << ",x_" << k;
  for (std::size_t k = 1; k <= d; ++k) out << ",xi_" << k;
  out << ",p\n";
  out << std::setprecision(17);
  for (const auto& s : tr.points) {
    out << s.t;
    for (double v : s.w.x) out << ',' << v;
    for (double v : s.w.xi) out << ',' << v;
    out << ',' << s.p << '\n';
  }
}

}  // namespace dslab
