#include "dslab/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dslab {

std::string to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::undecided:
      return "undecided";
  }
  return "unknown";
}

Status VerdictReport::overall() const {
  bool undecided = false;
  for (const auto& v : verdicts) {
    if (v.status == Status::fail) return Status::fail;
    undecided = undecided || v.status == Status::undecided;
  }
  return undecided ? Status::undecided : Status::pass;
}

int exit_code(Status s) {
  switch (s) {
    case Status::pass:
      return 0;
    case Status::fail:
      return 1;
    case Status::undecided:
      return 2;
  }
  return 1;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

namespace {

// JSON has no inf/nan; they become strings so the file stays valid.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

nlohmann::ordered_json number_map(const std::map<std::string, double>& m) {
  auto j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m) j[k] = number(v);
  return j;
}

}  // namespace

std::string report_json(const VerdictReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = {{"id", r.scenario_id},
                   {"target", r.target},
                   {"out_of_hypothesis", r.out_of_hypothesis},
                   {"config", r.scenario_config}};
  j["status"] = to_string(r.overall());
  j["measurements"] = number_map(r.measurements);
  auto verdicts = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"status", to_string(v.status)},
                        {"measured", number(v.measured)},
                        {"target", number(v.target)},
                        {"tolerance", number(v.tolerance)},
                        {"criterion", v.criterion},
                        {"detail", v.detail}});
  }
  j["verdicts"] = verdicts;
  j["diagnostics"] = number_map(r.diagnostics);
  j["notes"] = r.notes;
  auto files = nlohmann::ordered_json::array();
  for (const auto& t : r.tables) files.push_back(t.name + ".csv");
  j["csv"] = files;
  return j.dump(2) + "\n";
}

std::string csv_text(const CsvTable& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
  return out.str();
}

void write_report(const std::filesystem::path& dir, const VerdictReport& r) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
  };
  write(dir / "report.json", report_json(r));
  for (const auto& t : r.tables) write(dir / (t.name + ".csv"), csv_text(t));
}

CsvTable sweep_table_csv(const SweepTable& t, const std::string& name) {
  CsvTable out{name, {"z_re", "z_im", "n", "delta", "norm", "envelope", "residual_max", "converged"}, {}};
  for (const auto& row : t.rows) {
    out.rows.push_back({format_number(row.z.real()), format_number(row.z.imag()), std::to_string(row.n),
                        format_number(row.delta), format_number(row.norm), format_number(row.envelope),
                        format_number(row.residual_max), row.converged ? "true" : "false"});
  }
  return out;
}

CsvTable series_csv(const std::vector<DecaySeries>& series, const std::string& scenario_id, const std::string& name) {
  CsvTable out{name, {"t", "value", "observable", "scenario_id"}, {}};
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      out.rows.push_back({format_number(s.times[i]), format_number(s.values[i]), s.label, scenario_id});
    }
  }
  return out;
}

CsvTable trajectory_table(const Trajectory& tr, const std::string& name) {
  CsvTable out{name, {"t"}, {}};
  const std::size_t d = tr.points.empty() ? 0 : tr.points.front().w.x.size();
  for (std::size_t k = 1; k <= d; ++k) out.columns.push_back("x_" + std::to_string(k));
  for (std::size_t k = 1; k <= d; ++k) out.columns.push_back("xi_" + std::to_string(k));
  out.columns.push_back("p");
  for (const auto& s : tr.points) {
    std::vector<std::string> row{format_number(s.t)};
    for (double v : s.w.x) row.push_back(format_number(v));
    for (double v : s.w.xi) row.push_back(format_number(v));
    row.push_back(format_number(s.p));
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace dslab
