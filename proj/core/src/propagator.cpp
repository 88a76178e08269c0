#include "dslab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dslab/fit.hpp"
#include "dslab/krylov.hpp"

namespace dslab {

Scheme parse_scheme(const std::string& name) {
  if (name == "strang_split" || name == "strang") return Scheme::strang_split;
  if (name == "krylov_expm" || name == "krylov") return Scheme::krylov_expm;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(Scheme s) { return s == Scheme::strang_split ? "strang_split" : "krylov_expm"; }

std::string Observable::label() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::local_energy:
      s << "local_energy(delta=" << parameter << ")";
      break;
    case Kind::smoothing:
      s << "smoothing(gamma=" << parameter << ")";
      break;
    case Kind::l2_norm:
      s << "l2_norm";
      break;
  }
  return s.str();
}

void validate(const EvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.t_max >= cfg.dt)) throw std::invalid_argument("t_max must be at least dt");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (cfg.krylov_dim < 0) throw std::invalid_argument("krylov_dim must be >= 0");
  for (const auto& o : cfg.observables) {
    if (o.kind == Observable::Kind::local_energy && o.parameter < 0.0) {
      throw std::invalid_argument("local energy needs delta >= 0");
    }
    if (o.kind == Observable::Kind::smoothing && (o.parameter < 0.0 || o.parameter > 2.0)) {
      throw std::invalid_argument("smoothing exponent gamma must lie in [0, 2]");
    }
  }
}

double local_energy(const ComplexField& u, double delta) {
  if (delta < 0.0) throw std::invalid_argument("local energy needs delta >= 0");
  if (delta == 0.0) return l2_norm(u);
  return l2_norm(u, weight_table(u.grid(), -2.0 * delta));
}

double smoothing_integrand(const ComplexField& u, double gamma) {
  const ComplexField v = apply_multiplier(u, bessel_table(u.grid(), 0.5 * gamma));
  const double n = l2_norm(v, weight_table(u.grid(), -2.0));
  return n * n;
}

namespace {

// Per-observable cached tables so that each record costs one pass (plus one
// transform pair for smoothing).
struct Recorder {
  Observable obs;
  std::vector<double> weight_sq;
  std::optional<MultiplierTable> multiplier;

  Recorder(const Grid& g, const Observable& o) : obs(o) {
    switch (o.kind) {
      case Observable::Kind::local_energy:
        weight_sq = weight_table(g, -2.0 * o.parameter);
        break;
      case Observable::Kind::smoothing:
        weight_sq = weight_table(g, -2.0);
        multiplier = bessel_table(g, 0.5 * o.parameter);
        break;
      case Observable::Kind::l2_norm:
        break;
    }
  }

  double measure(const ComplexField& u, const DampedOperator& op) const {
    switch (obs.kind) {
      case Observable::Kind::local_energy:
        return l2_norm(u, weight_sq);
      case Observable::Kind::smoothing: {
        const double n = l2_norm(apply_multiplier(u, *multiplier), weight_sq);
        return n * n;
      }
      case Observable::Kind::l2_norm:
        return op.norm_w(u);
    }
    return 0.0;
  }
};

MultiplierTable free_flow_table(const Grid& g, double tau) {
  const auto k2 = g.frequency_squared();
  std::vector<Complex> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::polar(1.0, -tau * k2[i]);
  return MultiplierTable(g, std::move(v), "exp(-i tau |xi|^2)");
}

bool unit_weight(const DampedOperator& op) {
  const auto w = op.weight();
  return std::all_of(w.begin(), w.end(), [](double v) { return v == 1.0; });
}

}  // namespace

EvolutionResult evolve(const DampedOperator& op, const ComplexField& u0, const EvolutionConfig& cfg) {
  validate(cfg);
  if (!(u0.grid() == op.grid())) throw std::invalid_argument("initial data lives on another grid");
  const double n_start = op.norm_w(u0);
  if (n_start == 0.0) throw std::invalid_argument("initial data must be nonzero");
  if (cfg.scheme == Scheme::strang_split && !unit_weight(op)) {
    throw std::invalid_argument("strang_split needs unit weight; use krylov_expm");
  }
  const Grid& g = op.grid();

  std::vector<Recorder> recorders;
  EvolutionResult res(u0);
  for (const auto& o : cfg.observables) {
    recorders.emplace_back(g, o);
    res.series.push_back({{}, {}, o.label()});
  }

  const int steps = static_cast<int>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
  const double last_dt = cfg.t_max - (steps - 1) * cfg.dt;
  const bool remainder_active = !op.is_flat_metric() || op.has_damping();
  const int m_split = cfg.krylov_dim > 0 ? cfg.krylov_dim : 10;
  const int m_full = cfg.krylov_dim > 0 ? cfg.krylov_dim : 30;

  const LinearMap remainder = [&op](const ComplexField& v) {
    ComplexField out(v.grid());
    if (!op.is_flat_metric()) out.axpy(Complex(0.0, -1.0), op.apply_metric_correction(v));
    if (op.has_damping()) out -= op.apply_B(v);
    return out;
  };
  const LinearMap generator = [&op](const ComplexField& v) {
    ComplexField out = op.apply_H(v);
    out *= Complex(0.0, -1.0);
    return out;
  };
  const InnerProduct ip = [&op](const ComplexField& a, const ComplexField& b) { return op.inner_w(a, b); };

  std::optional<MultiplierTable> half_main, half_last;
  if (cfg.scheme == Scheme::strang_split) {
    half_main = free_flow_table(g, 0.5 * cfg.dt);
    if (std::abs(last_dt - cfg.dt) > 1e-14) half_last = free_flow_table(g, 0.5 * last_dt);
  }

  bool recording_local = true;
  auto record = [&](const ComplexField& u, double t) {
    const double bm = boundary_mass_fraction(u, cfg.boundary_layer);
    if (recording_local && bm > cfg.wrap_threshold) {
      recording_local = false;
      res.wrap_time = t;
    }
    res.max_boundary_mass = std::max(res.max_boundary_mass, bm);
    for (std::size_t k = 0; k < recorders.size(); ++k) {
      if (recorders[k].obs.kind == Observable::Kind::local_energy && !recording_local) continue;
      res.series[k].times.push_back(t);
      res.series[k].values.push_back(recorders[k].measure(u, op));
    }
  };

  ComplexField u = u0;
  double norm_prev = n_start;
  double t = 0.0;
  record(u, t);
  for (int k = 0; k < steps; ++k) {
    const bool last = k == steps - 1;
    const double tau = last ? last_dt : cfg.dt;
    if (cfg.scheme == Scheme::strang_split) {
      const MultiplierTable& half = (last && half_last) ? *half_last : *half_main;
      u = apply_multiplier(u, half);
      if (remainder_active) {
        auto r = krylov_expm_adaptive(remainder, u, Complex(tau), m_split, cfg.krylov_tol, ip);
        res.max_krylov_error = std::max(res.max_krylov_error, r.error_estimate);
        u = std::move(r.value);
      }
      u = apply_multiplier(u, half);
    } else {
      auto r = krylov_expm_adaptive(generator, u, Complex(tau), m_full, cfg.krylov_tol, ip);
      res.max_krylov_error = std::max(res.max_krylov_error, r.error_estimate);
      u = std::move(r.value);
    }
    t = last ? cfg.t_max : (k + 1) * cfg.dt;
    res.steps = k + 1;

    if (!u.all_finite()) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << t;
      throw EvolutionError(msg.str(), t);
    }
    const double norm_now = op.norm_w(u);
    const double growth = norm_now / norm_prev - 1.0;
    res.max_step_growth = std::max(res.max_step_growth, growth);
    if (growth > cfg.growth_tol) {
      std::ostringstream msg;
      msg << "norm grew by " << growth << " in the step ending at t = " << t << " (allowed "
          << cfg.growth_tol << ")";
      throw EvolutionError(msg.str(), t);
    }
    norm_prev = norm_now;

    if ((k + 1) % cfg.record_every == 0) {
      record(u, t);
      if (cfg.stop_on_wrap && res.wrap_time) break;
    }
  }
  res.final_state = std::move(u);
  res.t_final = t;
  return res;
}

DecayFit fit_decay_exponent(const DecaySeries& series, std::pair<double, double> t_window) {
  if (series.times.size() != series.values.size()) throw std::invalid_argument("malformed series");
  std::vector<double> t, v;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double ti = series.times[i];
    if (ti >= t_window.first && ti <= t_window.second && ti > 0.0 && series.values[i] > 0.0) {
      t.push_back(ti);
      v.push_back(series.values[i]);
    }
  }
  if (t.size() < 8) {
    std::ostringstream msg;
    msg << "decay fit window [" << t_window.first << ", " << t_window.second << "] holds "
        << t.size() << " samples; at least 8 are required";
    throw std::invalid_argument(msg.str());
  }
  const auto fit = fit_log_log(t, v);
  return {fit.slope, fit.r2, static_cast<int>(t.size())};
}

double trapezoid(const DecaySeries& s, double t_end) {
  double acc = 0.0;
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    const double t0 = s.times[i - 1];
    const double t1 = s.times[i];
    if (t0 >= t_end) break;
    if (t1 <= t_end) {
      acc += 0.5 * (t1 - t0) * (s.values[i - 1] + s.values[i]);
    } else {
      const double frac = (t_end - t0) / (t1 - t0);
      const double v_end = s.values[i - 1] + frac * (s.values[i] - s.values[i - 1]);
      acc += 0.5 * (t_end - t0) * (s.values[i - 1] + v_end);
      break;
    }
  }
  return acc;
}

double SmoothingResult::ratio_at(double t) const {
  if (initial_norm_sq == 0.0) return 0.0;
  return trapezoid(integrand, t) / initial_norm_sq;
}

SmoothingResult smoothing_integral(const DampedOperator& op, const ComplexField& u0, double gamma,
                                   EvolutionConfig cfg) {
  if (gamma < 0.0 || gamma > 2.0) throw std::invalid_argument("smoothing exponent gamma must lie in [0, 2]");
  SmoothingResult res;
  res.integrand.label = Observable::smoothing(gamma).label();
  const double n0 = l2_norm(u0);
  res.initial_norm_sq = n0 * n0;
  if (n0 == 0.0) {
    validate(cfg);
    return res;
  }
  cfg.observables = {Observable::smoothing(gamma)};
  cfg.stop_on_wrap = false;
  const auto ev = evolve(op, u0, cfg);
  res.integrand = ev.series.front();
  res.t_final = ev.t_final;
  res.max_boundary_mass = ev.max_boundary_mass;
  res.max_step_growth = ev.max_step_growth;
  const double T = ev.t_final;
  res.integral = trapezoid(res.integrand, T);
  res.ratio = res.integral / res.initial_norm_sq;
  if (res.integral > 0.0) {
    res.final_quarter_increment = (res.integral - trapezoid(res.integrand, 0.75 * T)) / res.integral;
  }
  return res;
}

}  // namespace dslab
