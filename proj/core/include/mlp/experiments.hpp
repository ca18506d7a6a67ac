#pragma once

// Registered numerical experiments. Each one reproduces a table or figure of
// the study — error tables over level counts, iteration sweeps, averaging
// window-length comparisons, shallow-water convergence, serial-step tables —
// as deterministic CSV plus optional long-format plot data, with built-in
// expectation checks (exact-integer, tight-float, factor-band, or ordering
// properties).

#include "mlp/csv.hpp"

#include <map>
#include <string>
#include <vector>

namespace mlp {

struct RunOptions {
  std::map<std::string, std::string> overrides;  // --set key=value
  int workers = 1;
  bool heavy = false;   // include the minutes-scale configurations
  std::string out_dir;  // when nonempty, write <id>.csv (and <id>_plot.csv)
};

struct CheckOutcome {
  std::string name;
  bool passed = false;
  bool skipped = false;  // not applicable under the current options
  std::string detail;
};

struct ExperimentResult {
  std::string id;
  CsvTable table;  // includes a wall_seconds column (the only varying one)
  CsvTable plot;   // long format: x, series, y; empty when not applicable
  std::vector<CheckOutcome> checks;
  double wall_seconds = 0.0;

  // all non-skipped checks passed
  bool checks_passed() const;
};

// registered ids in display order
std::vector<std::string> experiment_ids();
bool has_experiment(const std::string& id);
std::string experiment_summary(const std::string& id);

// default configuration as flat key=value pairs (exactly the keys --set may
// override); defaults can differ between light and heavy mode
std::map<std::string, std::string> experiment_defaults(const std::string& id,
                                                       bool heavy);

ExperimentResult run_experiment(const std::string& id, const RunOptions& opt);

// multilevel schedule of the experiment's representative configuration,
// one rendered entry per line
std::vector<std::string> experiment_plan(const std::string& id,
                                         const RunOptions& opt);

}  // namespace mlp
