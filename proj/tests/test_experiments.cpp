#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mlp/csv.hpp"
#include "mlp/experiments.hpp"

using namespace mlp;
namespace fs = std::filesystem;

TEST_CASE("floating-point cells render with full round-trip precision") {
  CHECK(format_float(0.1) == "0.10000000000000001");
  CHECK(format_float(2.0) == "2");
  CHECK(format_float(-1.5) == "-1.5");
  for (double x : {1.0 / 3.0, 6.02e23, -7.25e-9, 1.2566212807763046e-05}) {
    CHECK(std::strtod(format_float(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("tables render as quoted comma-separated text") {
  CsvTable t;
  t.header = {"name", "value", "count"};
  t.rows.push_back({std::string("plain"), 0.5, 3LL});
  t.rows.push_back({std::string("a,b \"q\""), 1.0, -2LL});
  std::string expect =
      "name,value,count\n"
      "plain,0.5,3\n"
      "\"a,b \"\"q\"\"\",1,-2\n";
  CHECK(to_csv(t) == expect);

  CHECK(t.column_index("count") == 2);
  CHECK(t.column_index("missing") == -1);

  CsvTable bad = t;
  bad.rows.push_back({std::string("short")});
  CHECK_THROWS_AS(to_csv(bad), std::invalid_argument);
}

TEST_CASE("excluded columns disappear from header and rows") {
  CsvTable t;
  t.header = {"a", "wall_seconds", "b"};
  t.rows.push_back({1LL, 0.123, std::string("x")});
  CHECK(to_csv_excluding(t, {"wall_seconds"}) == "a,b\n1,x\n");
  // unknown names are ignored
  CHECK(to_csv_excluding(t, {"nope"}) == to_csv(t));
}

TEST_CASE("written files carry the rendered bytes") {
  CsvTable t;
  t.header = {"x", "y"};
  t.rows.push_back({1LL, 0.5});
  fs::path path = fs::temp_directory_path() / "mlp-test-write.csv";
  write_csv(path.string(), t);
  std::ifstream in(path, std::ios::binary);
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(body == to_csv(t));
  fs::remove(path);
  CHECK_THROWS_AS(write_csv("/nonexistent-dir/file.csv", t), std::runtime_error);
}

TEST_CASE("the study registry exposes the published experiments") {
  auto ids = experiment_ids();
  for (const char* id :
       {"decay_levels", "oscillatory_sweep", "three_scale_iters",
        "spring_windows", "rswe_f1", "rswe_f100", "complexity_tables"}) {
    CAPTURE(id);
    CHECK(has_experiment(id));
    CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
    CHECK(!experiment_summary(id).empty());
    // defaults parse and plans render for every registered study
    (void)experiment_defaults(id, false);
    CHECK(!experiment_plan(id, {}).empty());
  }
  CHECK(ids.size() == 7);
  CHECK(!has_experiment("nope"));
  CHECK_THROWS_AS(run_experiment("nope", {}), std::invalid_argument);
  CHECK_THROWS_AS(experiment_defaults("nope", false), std::invalid_argument);
}

TEST_CASE("parameter overrides are validated before running") {
  RunOptions opt;
  opt.overrides["not_a_key"] = "1";
  CHECK_THROWS_AS(run_experiment("decay_levels", opt), std::invalid_argument);

  RunOptions bad_value;
  bad_value.overrides["max_levels"] = "three";
  CHECK_THROWS_AS(run_experiment("decay_levels", bad_value),
                  std::invalid_argument);

  RunOptions bad_workers;
  bad_workers.workers = 0;
  CHECK_THROWS_AS(run_experiment("decay_levels", bad_workers),
                  std::invalid_argument);
}

TEST_CASE("level-count study reproduces its frozen error cells") {
  RunOptions opt;
  opt.overrides["max_levels"] = "3";
  ExperimentResult res = run_experiment("decay_levels", opt);
  REQUIRE(res.table.rows.size() == 2);
  int err_col = res.table.column_index("error");
  int lvl_col = res.table.column_index("levels");
  REQUIRE(err_col >= 0);
  REQUIRE(lvl_col >= 0);
  CHECK(std::get<long long>(res.table.rows[0][static_cast<size_t>(lvl_col)]) ==
        2);
  double e2 = std::get<double>(res.table.rows[0][static_cast<size_t>(err_col)]);
  double e3 = std::get<double>(res.table.rows[1][static_cast<size_t>(err_col)]);
  CHECK(e2 == doctest::Approx(1.2566212807763046e-05).epsilon(1e-6));
  CHECK(e3 == doctest::Approx(1.9562958164422008e-05).epsilon(1e-6));

  // every row carries a wall-time column so runs remain comparable
  CHECK(res.table.column_index("wall_seconds") ==
        static_cast<int>(res.table.columns()) - 1);
  CHECK(res.wall_seconds > 0.0);
}

TEST_CASE("frequency-sweep study accepts restricted parameter sets") {
  RunOptions opt;
  opt.overrides["r"] = "100";
  opt.overrides["levels"] = "2";
  ExperimentResult res = run_experiment("oscillatory_sweep", opt);
  REQUIRE(res.table.rows.size() == 1);
  const auto& row = res.table.rows[0];
  CHECK(std::get<long long>(row[0]) == 100); // r
  CHECK(std::get<long long>(row[1]) == 2);   // levels
  double err = std::get<double>(
      row[static_cast<size_t>(res.table.column_index("error"))]);
  // must stay within a factor of two of the published cell
  CHECK(err > 0.5 * 2.1697505917e-4);
  CHECK(err < 2.0 * 2.1697505917e-4);
  long long steps = std::get<long long>(
      row[static_cast<size_t>(res.table.column_index("serial_steps"))]);
  CHECK(steps > 0);
}

TEST_CASE("iteration study emits one plot series per coarse step choice") {
  RunOptions opt;
  opt.overrides["dT2"] = "0.6";
  opt.overrides["max_k2"] = "3";
  ExperimentResult res = run_experiment("three_scale_iters", opt);
  REQUIRE(res.table.rows.size() == 3);
  REQUIRE(res.plot.rows.size() == 3);
  REQUIRE(res.plot.header == std::vector<std::string>{"x", "series", "y"});
  for (size_t i = 0; i < res.plot.rows.size(); ++i) {
    CHECK(std::get<long long>(res.plot.rows[i][0]) ==
          static_cast<long long>(i) + 1);
    CHECK(std::get<std::string>(res.plot.rows[i][1]) == "ΔT=0.6");
    CHECK(std::get<double>(res.plot.rows[i][2]) > 0.0);
  }
  CHECK(res.table.column_index("embedded_error") >= 0);
}

TEST_CASE("study tables are identical across worker counts") {
  RunOptions one;
  one.overrides["dT2"] = "0.6";
  one.overrides["max_k2"] = "2";
  one.workers = 1;
  RunOptions two = one;
  two.workers = 2;
  ExperimentResult a = run_experiment("three_scale_iters", one);
  ExperimentResult b = run_experiment("three_scale_iters", two);
  CHECK(to_csv_excluding(a.table, {"wall_seconds"}) ==
        to_csv_excluding(b.table, {"wall_seconds"}));
  CHECK(to_csv(a.plot) == to_csv(b.plot));
}

TEST_CASE("requested output files are written next to each other") {
  fs::path dir = fs::temp_directory_path() / "mlp-test-out";
  fs::remove_all(dir);
  RunOptions opt;
  opt.overrides["max_levels"] = "2";
  opt.out_dir = dir.string();
  ExperimentResult res = run_experiment("decay_levels", opt);
  CHECK(fs::exists(dir / "decay_levels.csv"));
  std::ifstream in(dir / "decay_levels.csv", std::ios::binary);
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(body == to_csv(res.table));
  // plot data lands in a sibling file when the study produces one
  if (!res.plot.rows.empty()) CHECK(fs::exists(dir / "decay_levels_plot.csv"));
  fs::remove_all(dir);
}

TEST_CASE("check outcomes aggregate into a single verdict") {
  RunOptions opt;
  opt.overrides["max_levels"] = "4";
  ExperimentResult res = run_experiment("decay_levels", opt);
  REQUIRE(!res.checks.empty());
  bool all = true;
  for (const auto& c : res.checks) {
    CHECK(!c.name.empty());
    if (!c.passed && !c.skipped) all = false;
  }
  CHECK(res.checks_passed() == all);
  CHECK(res.checks_passed());
}
