// Command-line front end: run registered experiments (CSV to stdout and
// optionally to files), verify their built-in expectations, print multilevel
// schedules, and evaluate the serial-step cost model.

#include "mlp/complexity.hpp"
#include "mlp/csv.hpp"
#include "mlp/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

mlp::RunOptions parse_sets(const std::vector<std::string>& sets,
                           int workers, bool heavy, const std::string& out) {
  mlp::RunOptions opt;
  opt.workers = workers;
  opt.heavy = heavy;
  opt.out_dir = out;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    }
    opt.overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return opt;
}

int print_checks(const mlp::ExperimentResult& res) {
  int failures = 0;
  for (const auto& ch : res.checks) {
    const char* tag = ch.skipped ? "SKIP" : (ch.passed ? "PASS" : "FAIL");
    if (!ch.skipped && !ch.passed) ++failures;
    std::printf("%s  %-28s %s  (%s)\n", tag, ch.name.c_str(), res.id.c_str(),
                ch.detail.c_str());
  }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mlp: multilevel parallel-in-time experiment runner"};
  app.require_subcommand(1);

  std::string id;
  std::vector<std::string> sets;
  int workers = 1;
  bool heavy = false;
  std::string out_dir;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--set", sets,
                    "override a configuration key (key=value, repeatable)");
    cmd->add_option("--workers", workers, "worker threads for fine sweeps")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--heavy", heavy,
                  "include the minutes-scale configurations");
    if (with_out) {
      cmd->add_option("--out", out_dir,
                      "directory to write <id>.csv and <id>_plot.csv");
    }
  };

  CLI::App* run = app.add_subcommand(
      "run", "run one experiment; its result table is printed as CSV");
  run->add_option("id", id, "experiment id")->required();
  add_common(run, true);

  CLI::App* check = app.add_subcommand(
      "check", "run an experiment (or 'all') and verify its expectations");
  check->add_option("id", id, "experiment id or 'all'")->required();
  add_common(check, false);

  CLI::App* plan = app.add_subcommand(
      "plan", "print an experiment's configuration and multilevel schedule");
  plan->add_option("id", id, "experiment id")->required();
  add_common(plan, false);

  CLI::App* cx =
      app.add_subcommand("complexity", "evaluate the serial-step cost model");
  int levels = 2;
  long long coarsen = 0, fine_steps = 0;
  cx->add_option("--levels", levels, "level count L")->required();
  cx->add_option("--coarsen", coarsen, "uniform coarsening factor N")
      ->required();
  cx->add_option("--fine-steps", fine_steps, "total fine steps X")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      mlp::RunOptions opt = parse_sets(sets, workers, heavy, out_dir);
      mlp::ExperimentResult res = mlp::run_experiment(id, opt);
      std::fputs(mlp::to_csv(res.table).c_str(), stdout);
      return 0;
    }
    if (check->parsed()) {
      mlp::RunOptions opt = parse_sets(sets, workers, heavy, "");
      std::vector<std::string> ids =
          id == "all" ? mlp::experiment_ids() : std::vector<std::string>{id};
      int failures = 0;
      for (const auto& eid : ids) {
        failures += print_checks(mlp::run_experiment(eid, opt));
      }
      if (failures > 0) {
        std::fprintf(stderr, "mlp: %d check(s) failed\n", failures);
        return 1;
      }
      return 0;
    }
    if (plan->parsed()) {
      mlp::RunOptions opt = parse_sets(sets, workers, heavy, "");
      std::printf("[%s]\n", id.c_str());
      for (const auto& [key, value] : mlp::experiment_defaults(id, heavy)) {
        auto it = opt.overrides.find(key);
        std::printf("%s=%s\n", key.c_str(),
                    it == opt.overrides.end() ? value.c_str()
                                              : it->second.c_str());
      }
      std::printf("\n");
      for (const auto& line : mlp::experiment_plan(id, opt)) {
        std::printf("%s\n", line.c_str());
      }
      return 0;
    }
    if (cx->parsed()) {
      mlp::CoarseningReport rep =
          mlp::optimal_coarsening(levels, static_cast<double>(fine_steps));
      std::printf("serial_steps=%lld\n",
                  mlp::v_cycle_steps(levels, coarsen, fine_steps));
      std::printf("n_opt=%s\n", mlp::format_float(rep.n_opt).c_str());
      std::printf("f(%lld)=%s\nf(%lld)=%s\n", rep.n_floor,
                  mlp::format_float(rep.f_floor).c_str(), rep.n_ceil,
                  mlp::format_float(rep.f_ceil).c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mlp: error: %s\n", e.what());
    return 2;
  }
  return 0;
}
