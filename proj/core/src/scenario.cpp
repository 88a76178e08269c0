#include "dslab/scenario.hpp"

#include <algorithm>
#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace dslab {

Target parse_target(const std::string& name) {
  static const std::map<std::string, Target> m = {
      {"decay", Target::decay},           {"smoothing", Target::smoothing}, {"resolvent", Target::resolvent},
      {"structural", Target::structural}, {"classical", Target::classical}, {"loss", Target::loss}};
  const auto it = m.find(name);
  if (it == m.end()) throw ConfigError("unknown target '" + name + "'");
  return it->second;
}

std::string to_string(Target t) {
  switch (t) {
    case Target::decay:
      return "decay";
    case Target::smoothing:
      return "smoothing";
    case Target::resolvent:
      return "resolvent";
    case Target::structural:
      return "structural";
    case Target::classical:
      return "classical";
    case Target::loss:
      return "loss";
  }
  return "unknown";
}

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::identity:
      return "identity";
    case MetricKind::conformal_bump:
      return "conformal_bump";
    case MetricKind::trapping_well:
      return "trapping_well";
    case MetricKind::user_table:
      return "user_table";
  }
  return "unknown";
}

std::string to_string(DampingKind k) {
  switch (k) {
    case DampingKind::none:
      return "none";
    case DampingKind::gaussian:
      return "gaussian";
    case DampingKind::annulus:
      return "annulus";
    case DampingKind::user_table:
      return "user_table";
  }
  return "unknown";
}

std::string to_string(WeightChoice w) { return w == WeightChoice::unit ? "unit" : "beltrami"; }

namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  s = trim(std::move(s));
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + raw + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + raw + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + raw + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("key '" + key + "': unterminated list '" + raw + "'");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + "]";
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

template <typename Fn>
auto translate(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

MetricKind parse_metric_kind(const std::string& v) {
  if (v == "identity") return MetricKind::identity;
  if (v == "conformal_bump") return MetricKind::conformal_bump;
  if (v == "trapping_well") return MetricKind::trapping_well;
  throw std::invalid_argument("unknown metric kind '" + v + "' (identity, conformal_bump, trapping_well)");
}

DampingKind parse_damping_kind(const std::string& v) {
  if (v == "none") return DampingKind::none;
  if (v == "gaussian") return DampingKind::gaussian;
  if (v == "annulus") return DampingKind::annulus;
  throw std::invalid_argument("unknown damping kind '" + v + "' (none, gaussian, annulus)");
}

WeightChoice parse_weight(const std::string& v) {
  if (v == "unit") return WeightChoice::unit;
  if (v == "beltrami") return WeightChoice::beltrami;
  throw std::invalid_argument("unknown weight '" + v + "' (unit, beltrami)");
}

struct Key {
  std::string name;  // section.key
  std::function<std::string(const Scenario&)> get;
  std::function<void(Scenario&, const std::string&)> set;
};

Key real_key(std::string name, double Scenario::*m) {
  const std::string n = name;
  return {std::move(name), [m](const Scenario& s) { return format_double(s.*m); },
          [m, n](Scenario& s, const std::string& v) { s.*m = parse_double(n, v); }};
}

Key int_key(std::string name, int Scenario::*m) {
  const std::string n = name;
  return {std::move(name), [m](const Scenario& s) { return std::to_string(s.*m); },
          [m, n](Scenario& s, const std::string& v) { s.*m = parse_int(n, v); }};
}

Key bool_key(std::string name, bool Scenario::*m) {
  const std::string n = name;
  return {std::move(name), [m](const Scenario& s) { return std::string(s.*m ? "true" : "false"); },
          [m, n](Scenario& s, const std::string& v) { s.*m = parse_bool(n, v); }};
}

Key list_key(std::string name, std::vector<double> Scenario::*m) {
  const std::string n = name;
  return {std::move(name), [m](const Scenario& s) { return format_list(s.*m); },
          [m, n](Scenario& s, const std::string& v) { s.*m = parse_list(n, v); }};
}

template <typename Get, typename Set>
Key custom_key(std::string name, Get get, Set set) {
  const std::string n = name;
  return {std::move(name), std::move(get),
          [set, n](Scenario& s, const std::string& v) { translate(n, [&] { set(s, unquote(v)); }); }};
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back(custom_key("scenario.id", [](const Scenario& s) { return quoted(s.id); },
                           [](Scenario& s, const std::string& v) { s.id = v; }));
    k.push_back(custom_key("scenario.target", [](const Scenario& s) { return quoted(to_string(s.target)); },
                           [](Scenario& s, const std::string& v) { s.target = parse_target(v); }));
    k.push_back(custom_key("scenario.description", [](const Scenario& s) { return quoted(s.description); },
                           [](Scenario& s, const std::string& v) { s.description = v; }));

    k.push_back(int_key("grid.dim", &Scenario::dim));
    k.push_back(int_key("grid.n", &Scenario::n));
    k.push_back(real_key("grid.half_width", &Scenario::half_width));

    k.push_back(custom_key("metric.kind", [](const Scenario& s) { return quoted(to_string(s.metric.kind)); },
                           [](Scenario& s, const std::string& v) { s.metric.kind = parse_metric_kind(v); }));
    k.push_back(custom_key("metric.amplitude", [](const Scenario& s) { return format_double(s.metric.amplitude); },
                           [](Scenario& s, const std::string& v) { s.metric.amplitude = parse_double("metric.amplitude", v); }));
    k.push_back(custom_key("metric.width", [](const Scenario& s) { return format_double(s.metric.width); },
                           [](Scenario& s, const std::string& v) { s.metric.width = parse_double("metric.width", v); }));
    k.push_back(custom_key("metric.rho", [](const Scenario& s) { return format_double(s.metric.rho); },
                           [](Scenario& s, const std::string& v) { s.metric.rho = parse_double("metric.rho", v); }));
    k.push_back(custom_key("metric.weight", [](const Scenario& s) { return quoted(to_string(s.weight)); },
                           [](Scenario& s, const std::string& v) { s.weight = parse_weight(v); }));

    k.push_back(custom_key("damping.kind", [](const Scenario& s) { return quoted(to_string(s.damping.kind)); },
                           [](Scenario& s, const std::string& v) { s.damping.kind = parse_damping_kind(v); }));
    k.push_back(custom_key("damping.amplitude", [](const Scenario& s) { return format_double(s.damping.amplitude); },
                           [](Scenario& s, const std::string& v) { s.damping.amplitude = parse_double("damping.amplitude", v); }));
    k.push_back(custom_key("damping.width", [](const Scenario& s) { return format_double(s.damping.width); },
                           [](Scenario& s, const std::string& v) { s.damping.width = parse_double("damping.width", v); }));
    k.push_back(custom_key("damping.center", [](const Scenario& s) { return format_list(s.damping.center); },
                           [](Scenario& s, const std::string& v) { s.damping.center = parse_list("damping.center", v); }));
    k.push_back(custom_key("damping.radius", [](const Scenario& s) { return format_double(s.damping.radius); },
                           [](Scenario& s, const std::string& v) { s.damping.radius = parse_double("damping.radius", v); }));
    k.push_back(custom_key("damping.alpha", [](const Scenario& s) { return format_double(s.damping.alpha); },
                           [](Scenario& s, const std::string& v) { s.damping.alpha = parse_double("damping.alpha", v); }));
    k.push_back(custom_key("damping.rho", [](const Scenario& s) { return format_double(s.damping.rho); },
                           [](Scenario& s, const std::string& v) { s.damping.rho = parse_double("damping.rho", v); }));

    k.push_back(list_key("initial.center", &Scenario::center));
    k.push_back(real_key("initial.width", &Scenario::width));
    k.push_back(list_key("initial.momentum", &Scenario::momentum));
    k.push_back(int_key("initial.ensemble", &Scenario::ensemble));
    k.push_back(real_key("initial.momentum_min", &Scenario::momentum_min));
    k.push_back(real_key("initial.momentum_max", &Scenario::momentum_max));
    k.push_back(real_key("initial.center_jitter", &Scenario::center_jitter));

    k.push_back(real_key("evolution.dt", &Scenario::dt));
    k.push_back(real_key("evolution.t_max", &Scenario::t_max));
    k.push_back(custom_key("evolution.scheme", [](const Scenario& s) { return quoted(to_string(s.scheme)); },
                           [](Scenario& s, const std::string& v) { s.scheme = parse_scheme(v); }));
    k.push_back(int_key("evolution.record_every", &Scenario::record_every));
    k.push_back(real_key("evolution.delta", &Scenario::delta));
    k.push_back(real_key("evolution.gamma", &Scenario::gamma));
    k.push_back(real_key("evolution.fit_start", &Scenario::fit_start));
    k.push_back(real_key("evolution.fit_end", &Scenario::fit_end));
    k.push_back(list_key("evolution.sigma", &Scenario::sigma));
    k.push_back(bool_key("evolution.double_horizon", &Scenario::double_horizon));

    k.push_back(custom_key("resolvent.regime", [](const Scenario& s) { return quoted(to_string(s.regime)); },
                           [](Scenario& s, const std::string& v) { s.regime = parse_regime(v); }));
    k.push_back(int_key("resolvent.n", &Scenario::power_n));
    k.push_back(real_key("resolvent.tau_min", &Scenario::tau_min));
    k.push_back(real_key("resolvent.tau_max", &Scenario::tau_max));
    k.push_back(real_key("resolvent.tau_factor", &Scenario::tau_factor));
    k.push_back(real_key("resolvent.imag_ratio", &Scenario::imag_ratio));
    k.push_back(real_key("resolvent.solver_tol", &Scenario::solver_tol));
    k.push_back(int_key("resolvent.max_iters", &Scenario::max_iters));
    k.push_back(real_key("resolvent.power_tol", &Scenario::power_tol));
    k.push_back(int_key("resolvent.power_max_iters", &Scenario::power_max_iters));
    k.push_back(bool_key("resolvent.trapping", &Scenario::trapping));

    k.push_back(real_key("classical.t_max", &Scenario::flow_t_max));
    k.push_back(real_key("classical.dt", &Scenario::flow_dt));
    k.push_back(real_key("classical.r_escape", &Scenario::r_escape));
    k.push_back(real_key("classical.a_threshold", &Scenario::a_threshold));
    k.push_back(int_key("classical.ring_samples", &Scenario::ring_samples));
    k.push_back(int_key("classical.probe_samples", &Scenario::probe_samples));
    k.push_back(real_key("classical.probe_radius", &Scenario::probe_radius));
    k.push_back(real_key("classical.beta", &Scenario::beta));

    k.push_back(int_key("structural.dissipativity_samples", &Scenario::dissipativity_samples));
    k.push_back(int_key("structural.quadratic_points", &Scenario::quadratic_points));
    k.push_back(int_key("structural.trivial_bound_samples", &Scenario::trivial_bound_samples));
    k.push_back(int_key("structural.perturbation_max_m", &Scenario::perturbation_max_m));
    k.push_back(int_key("structural.perturbation_size", &Scenario::perturbation_size));

    k.push_back(real_key("tolerance.slope", &Scenario::slope_tol));
    k.push_back(real_key("tolerance.ratio_max", &Scenario::ratio_max));
    k.push_back(real_key("tolerance.increment_max", &Scenario::increment_max));
    return k;
  }();
  return keys;
}

const Key& find_key(const std::string& name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return k;
  }
  throw ConfigError("unknown key '" + name + "'");
}

void check_consistency(const Scenario& s) {
  if (s.dim < 1 || s.dim > 3) throw ConfigError("grid.dim must be 1, 2 or 3");
  if (s.n < 4) throw ConfigError("grid.n must be >= 4");
  if (!(s.half_width > 0.0)) throw ConfigError("grid.half_width must be positive");
  const auto check_len = [&](const std::vector<double>& v, const char* key) {
    if (!v.empty() && static_cast<int>(v.size()) != s.dim) {
      throw ConfigError(std::string("key '") + key + "': expected " + std::to_string(s.dim) + " components");
    }
  };
  check_len(s.center, "initial.center");
  check_len(s.momentum, "initial.momentum");
  check_len(s.damping.center, "damping.center");
  if (s.ensemble < 1) throw ConfigError("initial.ensemble must be >= 1");
  if (!(s.width > 0.0)) throw ConfigError("initial.width must be positive");
  if (s.momentum_max < s.momentum_min) throw ConfigError("initial.momentum_max must be >= initial.momentum_min");
  if (s.tau_factor <= 1.0) throw ConfigError("resolvent.tau_factor must exceed 1");
  if (!(s.tau_min > 0.0) || s.tau_max < s.tau_min) throw ConfigError("resolvent.tau_min/tau_max must satisfy 0 < min <= max");
  if (s.gamma > 2.0) throw ConfigError("evolution.gamma must lie in [0, 2] (negative picks alpha~)");
}

}  // namespace

std::vector<std::string> scenario_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

void apply_override(Scenario& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  const std::string name = trim(assignment.substr(0, eq));
  find_key(name).set(s, assignment.substr(eq + 1));
}

void validate_scenario(const Scenario& s) { check_consistency(s); }

Scenario parse_scenario(std::istream& in, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Scenario s;
  std::set<std::string> sections;
  for (const auto& k : key_table()) sections.insert(k.name.substr(0, k.name.find('.')));
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError(source + ": key '" + section + "' outside a section");
    if (!sections.count(section)) throw ConfigError(source + ": unknown section '" + section + "'");
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      try {
        find_key(name).set(s, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
      }
    }
  }
  check_consistency(s);
  return s;
}

Scenario load_scenario(const std::string& ref) {
  const std::string prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) return builtin_scenario(ref.substr(prefix.size()));
  std::ifstream f(ref);
  if (!f) throw ConfigError("cannot open scenario file '" + ref + "'");
  return parse_scenario(f, ref);
}

std::string emit_scenario(const Scenario& s) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : key_table()) {
    const auto dot = k.name.find('.');
    const std::string sec = k.name.substr(0, dot);
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    out << k.name.substr(dot + 1) << " = " << k.get(s) << '\n';
  }
  return out.str();
}

namespace {

using Recipe = std::vector<std::string>;

const std::vector<std::pair<std::string, Recipe>>& recipes() {
  static const std::vector<std::pair<std::string, Recipe>> r = {
      {"free3d-decay",
       {"scenario.target=decay", "scenario.description=free flat d = 3 local energy decay", "grid.dim=3",
        "grid.n=64", "grid.half_width=24", "evolution.delta=2.6", "evolution.dt=0.05", "evolution.t_max=4",
        "evolution.fit_start=2"}},
      {"bump3d-damped-decay",
       {"scenario.target=decay", "scenario.description=conformal bump with short-range damping, d = 3",
        "grid.dim=3", "grid.n=64", "grid.half_width=24", "metric.kind=conformal_bump", "metric.amplitude=0.3",
        "damping.kind=gaussian", "damping.amplitude=1", "damping.width=1", "damping.alpha=1",
        "evolution.delta=2.6", "evolution.dt=0.05", "evolution.t_max=4", "evolution.fit_start=2"}},
      {"free1d-decay",
       {"scenario.target=decay", "scenario.description=free d = 1 dispersive decay (qualitative)", "grid.dim=1",
        "grid.n=2048", "grid.half_width=200", "evolution.delta=1.1", "evolution.dt=0.05", "evolution.t_max=30",
        "evolution.fit_start=5"}},
      {"damped3d-smoothing",
       {"scenario.target=smoothing", "scenario.description=damped d = 3 smoothing ratio, 10 seeded packets",
        // The change on doubling falls like 1/(v t_max) for ballistic packets,
        // so the box has to hold 2 v t_max of travel without re-entry.
        "grid.dim=3", "grid.n=96", "grid.half_width=34", "damping.kind=gaussian", "damping.amplitude=1",
        "damping.width=1", "damping.alpha=1", "initial.width=1.25", "initial.ensemble=10",
        "initial.momentum_min=1.5", "initial.momentum_max=2", "initial.center_jitter=1", "evolution.dt=0.25",
        "evolution.t_max=4", "evolution.double_horizon=true"}},
      {"flat2d-highfreq",
       {"scenario.target=resolvent", "scenario.description=flat d = 2 with damping, high-frequency sweep",
        "grid.dim=2", "grid.n=256", "grid.half_width=32", "damping.kind=gaussian", "damping.amplitude=1",
        "damping.width=1", "damping.alpha=1", "resolvent.regime=high", "resolvent.n=0", "evolution.delta=1",
        "resolvent.tau_min=4", "resolvent.tau_max=100", "resolvent.tau_factor=1.9", "resolvent.imag_ratio=0.01",
        "tolerance.slope=0.15"}},
      {"flat3d-sharplow",
       {"scenario.target=resolvent", "scenario.description=flat d = 3 with damping, sharp low-frequency sweep",
        "grid.dim=3", "grid.n=64", "grid.half_width=16", "damping.kind=gaussian", "damping.amplitude=1",
        "damping.width=1", "damping.alpha=1", "resolvent.regime=sharp_low", "resolvent.n=0",
        "evolution.delta=1", "resolvent.tau_min=0.01", "resolvent.tau_max=1", "resolvent.tau_factor=3.1622776601683795",
        "resolvent.imag_ratio=0.01", "tolerance.ratio_max=10"}},
      {"intermediate3d",
       {"scenario.target=resolvent", "scenario.description=bump metric with damping, compact frequency arc",
        "grid.dim=3", "grid.n=32", "grid.half_width=12", "metric.kind=conformal_bump", "metric.amplitude=0.3",
        "damping.kind=gaussian", "damping.amplitude=1", "damping.width=1", "damping.alpha=1",
        "resolvent.regime=intermediate", "resolvent.n=0", "evolution.delta=1", "resolvent.tau_min=0.5",
        "resolvent.tau_max=2", "resolvent.tau_factor=1.4142135623730951", "resolvent.imag_ratio=0.1",
        "tolerance.ratio_max=50"}},
      {"trapping2d-gcc",
       {"scenario.target=classical", "scenario.description=trapping well, damping on the stable ring",
        "grid.dim=2", "grid.n=64", "grid.half_width=8", "metric.kind=trapping_well", "metric.amplitude=10",
        "metric.width=1", "damping.kind=annulus", "damping.amplitude=1", "damping.width=0.3",
        "damping.radius=1.1871457819339988", "classical.t_max=200", "classical.r_escape=6"}},
      {"structural-flat",
       {"scenario.target=structural", "scenario.description=structural properties, free flat operator",
        "grid.dim=1", "grid.n=128", "grid.half_width=10"}},
      {"structural-bump",
       {"scenario.target=structural", "scenario.description=structural properties, bump metric with damping",
        "grid.dim=2", "grid.n=32", "grid.half_width=6", "metric.kind=conformal_bump", "metric.amplitude=0.5",
        "damping.kind=gaussian", "damping.amplitude=1", "damping.width=1", "damping.alpha=1"}},
      {"trapped3d-loss",
       {"scenario.target=loss", "scenario.description=trapping well with ring damping, alpha = 0, sigma comparison",
        "grid.dim=3", "grid.n=48", "grid.half_width=16", "metric.kind=trapping_well", "metric.amplitude=10",
        "metric.width=1", "damping.kind=annulus", "damping.amplitude=1", "damping.width=0.3",
        "damping.radius=1.1871457819339988", "damping.alpha=0", "evolution.delta=2.6",
        // A moving packet sheds a fast component in the well that trips the
        // wrap stop almost at once; a packet at rest lasts to t ~ 0.9.
        "evolution.dt=0.02", "evolution.t_max=1.2", "evolution.fit_start=0.2", "evolution.sigma=[0, 2]"}},
  };
  return r;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, recipe] : recipes()) out.push_back(name);
  return out;
}

Scenario builtin_scenario(const std::string& name) {
  for (const auto& [id, recipe] : recipes()) {
    if (id != name) continue;
    Scenario s;
    s.id = id;
    for (const auto& a : recipe) apply_override(s, a);
    check_consistency(s);
    return s;
  }
  throw ConfigError("unknown built-in scenario '" + name + "'");
}

std::vector<std::string> hypothesis_violations(const Scenario& s) {
  std::vector<std::string> v;
  const int kappa = kappa_for_dimension(s.dim);
  const double alpha = s.damping.alpha;
  auto note = [&](const std::string& what) { v.push_back(what); };
  if (s.damping.kind != DampingKind::none && (alpha < 0.0 || alpha >= 2.0)) {
    note("alpha = " + format_double(alpha) + " outside [0, 2)");
  }
  switch (s.target) {
    case Target::decay:
    case Target::smoothing:
    case Target::loss:
      if (s.dim < 3) note("d = " + std::to_string(s.dim) + " < 3");
      break;
    case Target::resolvent:
      if (s.dim < 3 && s.regime != Regime::a_priori) note("d = " + std::to_string(s.dim) + " < 3");
      break;
    case Target::structural:
    case Target::classical:
      break;
  }
  if (s.target == Target::decay || s.target == Target::loss) {
    if (!(s.delta > kappa + 0.5)) {
      note("delta = " + format_double(s.delta) + " <= kappa + 1/2 = " + format_double(kappa + 0.5));
    }
  }
  if (s.target == Target::resolvent) {
    const int n = s.power_n;
    switch (s.regime) {
      case Regime::intermediate:
      case Regime::high:
        if (!(s.delta > n + 0.5)) note("delta = " + format_double(s.delta) + " <= n + 1/2");
        break;
      case Regime::low: {
        const double need = (2 * n + 1 >= s.dim) ? n + 0.5 : n + 1.0;
        if (!(s.delta > need)) note("delta = " + format_double(s.delta) + " <= " + format_double(need) + " (low-frequency rule)");
        break;
      }
      case Regime::sharp_low:
        if (n != 0 || s.delta != 1.0) note("sharp low-frequency estimate is stated for n = 0 and delta = 1");
        break;
      case Regime::a_priori:
        break;
    }
    if (s.regime == Regime::high && s.metric.kind == MetricKind::trapping_well && !s.trapping) {
      note("trapping metric swept with the non-trapping exponent");
    }
  }
  return v;
}

std::vector<Complex> z_schedule(double tau_min, double tau_max, double factor, double imag_ratio) {
  if (!(tau_min > 0.0) || tau_max < tau_min || !(factor > 1.0)) {
    throw std::invalid_argument("z schedule needs 0 < tau_min <= tau_max and factor > 1");
  }
  std::vector<Complex> z;
  for (int k = 0;; ++k) {
    const double tau = tau_min * std::pow(factor, k);
    if (tau > tau_max * (1.0 + 1e-9)) break;
    z.emplace_back(tau, tau * imag_ratio);
  }
  return z;
}

}  // namespace dslab
