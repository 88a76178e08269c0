#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dslab/classical.hpp"
#include "dslab/propagator.hpp"
#include "dslab/resolvent.hpp"

namespace dslab {

enum class Status { pass, fail, undecided };
std::string to_string(Status s);

/// One gated comparison. `tolerance` is the scaled tolerance actually used.
struct Verdict {
  std::string name;
  Status status = Status::undecided;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string criterion;  // e.g. "|slope - target| <= tol"
  std::string detail;
};

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct VerdictReport {
  std::string scenario_id;
  std::string target;
  std::string scenario_config;              // emitted scenario text
  std::vector<std::string> out_of_hypothesis;
  std::map<std::string, double> measurements;
  std::vector<Verdict> verdicts;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
  std::vector<CsvTable> tables;

  /// fail if any verdict fails, else undecided if any is undecided, else pass.
  Status overall() const;
};

std::string format_number(double v);

/// Pretty JSON with sorted keys: scenario, measurements, verdicts, diagnostics.
std::string report_json(const VerdictReport& r);
/// Writes report.json and one <name>.csv per table into dir (created).
void write_report(const std::filesystem::path& dir, const VerdictReport& r);
std::string csv_text(const CsvTable& t);

CsvTable sweep_table_csv(const SweepTable& t, const std::string& name = "sweep");
/// Columns t, value, observable, scenario_id.
CsvTable series_csv(const std::vector<DecaySeries>& series, const std::string& scenario_id,
                    const std::string& name = "series");
CsvTable trajectory_table(const Trajectory& tr, const std::string& name);

/// Exit code policy: 0 all pass, 1 any fail, 2 undecided only.
int exit_code(Status s);

}  // namespace dslab
