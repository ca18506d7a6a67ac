#include "mlp/experiments.hpp"

#include "mlp/complexity.hpp"
#include "mlp/parareal.hpp"
#include "mlp/problems.hpp"
#include "mlp/scalar_engine.hpp"
#include "mlp/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mlp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// shortest decimal that round-trips (used for config values and series names)
std::string param_str(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::stod(buf) == v) return buf;
  }
  return format_float(v);
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid numeric value for '" + key +
                                "': " + s);
  }
}

int parse_int(const std::string& s, const std::string& key) {
  double v = parse_double(s, key);
  if (!near_integer(v)) {
    throw std::invalid_argument("expected an integer for '" + key +
                                "': " + s);
  }
  return static_cast<int>(std::llround(v));
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// configuration + result accumulator shared by the experiment bodies
struct Ctx {
  std::map<std::string, std::string> cfg;       // defaults merged with --set
  std::map<std::string, std::string> defaults;  // pristine defaults
  const RunOptions* opt = nullptr;
  CsvTable table;
  CsvTable plot;
  std::vector<CheckOutcome> checks;

  const std::string& str(const std::string& key) const { return cfg.at(key); }
  double d(const std::string& key) const {
    return parse_double(cfg.at(key), key);
  }
  int i(const std::string& key) const { return parse_int(cfg.at(key), key); }
  std::vector<double> dlist(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : split_commas(cfg.at(key))) {
      out.push_back(parse_double(s, key));
    }
    if (out.empty()) throw std::invalid_argument("empty list for '" + key + "'");
    return out;
  }
  std::vector<int> ilist(const std::string& key) const {
    std::vector<int> out;
    for (const auto& s : split_commas(cfg.at(key))) {
      out.push_back(parse_int(s, key));
    }
    if (out.empty()) throw std::invalid_argument("empty list for '" + key + "'");
    return out;
  }

  // whether the listed keys still parse to their default values (expectation
  // checks only apply to the shipped configuration)
  bool is_default(std::initializer_list<const char*> keys) const {
    for (const char* k : keys) {
      const std::string& a = cfg.at(k);
      const std::string& b = defaults.at(k);
      if (a == b) continue;
      try {
        auto av = split_commas(a);
        auto bv = split_commas(b);
        if (av.size() != bv.size()) return false;
        for (std::size_t i = 0; i < av.size(); ++i) {
          if (parse_double(av[i], k) != parse_double(bv[i], k)) return false;
        }
      } catch (const std::exception&) {
        return false;
      }
    }
    return true;
  }

  void check(const std::string& name, bool passed, const std::string& detail) {
    checks.push_back({name, passed, false, detail});
  }
  void skip(const std::string& name, const std::string& detail) {
    checks.push_back({name, false, true, detail});
  }
};

// ---------------------------------------------------------------------------
// shared construction helpers

MethodConfig make_method(const std::vector<double>& dts,
                         const std::vector<int>& iters,
                         const std::vector<double>& etas, Integrator integ,
                         double t0, double t_end, const Vec& u0,
                         bool averaging, int workers) {
  if (iters.size() + 1 != dts.size() || etas.size() + 1 != dts.size()) {
    throw std::invalid_argument(
        "need one iteration count and one window per coarse level");
  }
  MethodConfig cfg;
  int L = static_cast<int>(dts.size());
  for (int i = 0; i < L; ++i) {
    LevelSpec lv;
    lv.level = L - 1 - i;
    lv.dt = dts[i];
    lv.eta = (i < L - 1) ? etas[i] : 0.0;
    lv.iterations = (i < L - 1) ? iters[i] : 1;
    lv.integrator = integ;
    cfg.levels.push_back(lv);
  }
  cfg.t0 = t0;
  cfg.t_end = t_end;
  cfg.initial_condition = u0;
  cfg.averaging_enabled = averaging;
  cfg.workers = workers;
  return cfg;
}

std::vector<int> slice_vector(const std::vector<double>& dts, double span) {
  std::vector<int> s(dts.size());
  double top = span / dts[0];
  if (!near_integer(top)) {
    throw std::invalid_argument("span is not a multiple of the coarsest dt");
  }
  s[0] = static_cast<int>(std::llround(top));
  for (std::size_t l = 1; l < dts.size(); ++l) {
    double r = dts[l - 1] / dts[l];
    if (!near_integer(r)) {
      throw std::invalid_argument("non-integer refinement ratio");
    }
    s[l] = static_cast<int>(std::llround(r));
  }
  return s;
}

long long steps_total(const std::vector<double>& dts,
                      const std::vector<int>& iters, double span) {
  return serial_steps(slice_vector(dts, span), iters).total;
}

template <class Exact>
double mean_abs_error_nodes(const Trajectory& tr, const Exact& exact) {
  double s = 0.0;
  for (int i = 0; i < tr.size(); ++i) {
    s += std::abs(tr.states[i](0) - exact(tr.times[i]));
  }
  return s / tr.size();
}

std::vector<std::string> plan_lines(const MethodConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& e : cycle_plan(cfg)) out.push_back(e.to_string());
  return out;
}

// ---------------------------------------------------------------------------
// decay_levels: error vs level count for x' = -x, coarsest step fixed

std::map<std::string, std::string> defaults_decay(bool) {
  return {{"min_levels", "2"}, {"max_levels", "8"}, {"coarse_dt", "0.25"},
          {"refine", "10"},    {"t_end", "2"},      {"iterations", "1"}};
}

void run_decay(Ctx& c) {
  int lo = c.i("min_levels"), hi = c.i("max_levels");
  double dt0 = c.d("coarse_dt");
  int ratio = c.i("refine");
  double t_end = c.d("t_end");
  int k = c.i("iterations");
  if (lo < 2) throw std::invalid_argument("min_levels must be >= 2");
  if (hi < lo) throw std::invalid_argument("max_levels must be >= min_levels");
  if (hi > 9) throw std::invalid_argument("max_levels above 9 is impractical");
  if (ratio < 2) throw std::invalid_argument("refine must be >= 2");

  c.table.header = {"levels", "error", "serial_steps", "wall_seconds"};
  c.plot.header = {"x", "series", "y"};

  std::map<int, double> errs;
  double total_wall = 0.0;
  for (int L = lo; L <= hi; ++L) {
    auto start = Clock::now();
    std::vector<double> dts(L);
    dts[0] = dt0;
    for (int i = 1; i < L; ++i) dts[i] = dts[i - 1] / ratio;
    std::vector<int> iters(L - 1, k);
    ScalarMultilevel eng([](double, Complex y) { return -y; }, dts, iters);
    std::vector<Complex> nodes = eng.solve(0.0, t_end, Complex(1.0, 0.0));
    double err = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double t = 0.0 + static_cast<double>(i) * dt0;
      err += std::abs(nodes[i] - Complex(std::exp(-t), 0.0));
    }
    err /= static_cast<double>(nodes.size());
    double wall = seconds_since(start);
    total_wall += wall;
    errs[L] = err;
    c.table.rows.push_back({static_cast<long long>(L), err,
                            steps_total(dts, iters, t_end), wall});
    c.plot.rows.push_back(
        {static_cast<long long>(L), std::string("error"), err});
  }

  const std::pair<int, double> frozen[] = {
      {2, 1.2566212807763046e-05}, {3, 1.9562958164422008e-05},
      {4, 1.9807099440426344e-05}, {5, 1.9809587023590493e-05},
      {6, 1.9809615854133382e-05}, {7, 1.9809616125891306e-05},
      {8, 1.980961620086837e-05}};
  bool dflt =
      c.is_default({"coarse_dt", "refine", "t_end", "iterations"});
  if (dflt) {
    double worst = 0.0;
    bool ok = true, any = false;
    for (const auto& [L, v] : frozen) {
      if (L < lo || L > hi) continue;
      any = true;
      double rel = std::abs(errs.at(L) / v - 1.0);
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-2;
    }
    if (any) {
      c.check("decay-table", ok,
              "max relative deviation from expected errors = " +
                  param_str(worst) + " (tolerance 1e-2)");
    } else {
      c.skip("decay-table", "no levels in the expected range were run");
    }
  } else {
    c.skip("decay-table", "non-default configuration");
  }
  c.check("decay-runtime", total_wall < 1.0,
          "sweep took " + param_str(total_wall) + " s (limit 1 s)");
  if (dflt && lo <= 3 && hi >= 8) {
    double mn = errs.at(3), mx = errs.at(3);
    for (int L = 3; L <= 8; ++L) {
      mn = std::min(mn, errs.at(L));
      mx = std::max(mx, errs.at(L));
    }
    double spread = mx / mn - 1.0;
    c.check("decay-level-insensitivity", spread < 0.02,
            "error spread over levels 3..8 = " + param_str(spread) +
                " (limit 0.02)");
  } else {
    c.skip("decay-level-insensitivity",
           "needs the default configuration with levels 3..8");
  }
}

std::vector<std::string> plan_decay(const Ctx& c) {
  int L = c.i("max_levels");
  double dt0 = c.d("coarse_dt");
  int ratio = c.i("refine");
  std::vector<double> dts(L);
  dts[0] = dt0;
  for (int i = 1; i < L; ++i) dts[i] = dts[i - 1] / ratio;
  Vec u0 = Vec::Ones(1);
  return plan_lines(make_method(dts, std::vector<int>(L - 1, c.i("iterations")),
                                std::vector<double>(L - 1, 0.0),
                                Integrator::RK2, 0.0, c.d("t_end"), u0, false,
                                1));
}

// ---------------------------------------------------------------------------
// oscillatory_sweep: w' = -exp(irt) w^2 error table over (r, levels)

struct OscSetup {
  double dt0;
  std::vector<double> etas;  // per coarse level, finest-adjacent first
  int max_levels;
};

OscSetup osc_setup(int r) {
  switch (r) {
    case 100:
      return {1e-3, {0.2, 2.0}, 3};
    case 1000:
      return {1e-4, {0.02, 0.2, 2.0}, 4};
    case 10000:
      return {2.5e-5, {0.002, 0.02, 0.2, 2.0}, 5};
    default:
      throw std::invalid_argument(
          "r must be one of 100, 1000, 10000 (each has a calibrated step "
          "stack)");
  }
}

// dts coarse -> fine and windows per coarse level for an L-level stack
void osc_levels(const OscSetup& s, int L, std::vector<double>& dts,
                std::vector<double>& etas) {
  dts.resize(L);
  etas.resize(L - 1);
  for (int i = 0; i < L; ++i) {
    dts[i] = s.dt0 * std::pow(10.0, L - 1 - i);
  }
  for (int i = 0; i < L - 1; ++i) {
    etas[i] = s.etas[L - 2 - i];
  }
}

std::map<std::string, std::string> defaults_osc(bool heavy) {
  return {{"r", heavy ? "100,1000,10000" : "100,1000"}, {"levels", "all"}};
}

void run_osc(Ctx& c) {
  c.table.header = {"r", "levels", "error", "serial_steps", "wall_seconds"};
  c.plot.header = {"x", "series", "y"};

  static const std::map<std::pair<int, int>, double> expected = {
      {{100, 2}, 0.0002169750591733674},
      {{100, 3}, 0.00019811199764541986},
      {{1000, 2}, 2.1847140061040485e-06},
      {{1000, 3}, 2.106413305540747e-06},
      {{1000, 4}, 2.251750942815333e-06},
      {{10000, 2}, 3.0668862104273734e-07},
      {{10000, 3}, 3.0480547757705495e-07},
      {{10000, 4}, 3.0357016877934065e-07},
      {{10000, 5}, 2.7011063136189545e-07}};

  double light_wall = 0.0;
  bool any_light = false;
  double worst_ratio = 1.0;
  bool table_ok = true, any_cell = false;

  for (int r : c.ilist("r")) {
    OscSetup s = osc_setup(r);
    std::vector<int> want;
    if (c.str("levels") == "all") {
      for (int L = 2; L <= s.max_levels; ++L) want.push_back(L);
    } else {
      want = c.ilist("levels");
    }
    ProblemParams pp;
    pp.r = r;
    pp.w0 = Complex(1.0, 0.0);
    ProblemSpec p = make_problem(ProblemId::Oscillatory, pp);
    Vec u0 = default_initial(ProblemId::Oscillatory, pp);
    for (int L : want) {
      if (L < 2 || L > s.max_levels) {
        throw std::invalid_argument("levels for r=" + std::to_string(r) +
                                    " must be in 2.." +
                                    std::to_string(s.max_levels));
      }
      std::vector<double> dts, etas;
      osc_levels(s, L, dts, etas);
      std::vector<int> iters(L - 1, 1);
      MethodConfig cfg = make_method(dts, iters, etas, Integrator::RK2, 0.0,
                                     1.0, u0, true, c.opt->workers);
      PararealRun run = solve_multilevel(cfg, p);
      double err = mean_abs_error_nodes(
          run.final_trajectory(),
          [&](double t) { return exact_oscillatory(r, pp.w0, t); });
      c.table.rows.push_back({static_cast<long long>(r),
                              static_cast<long long>(L), err,
                              run.stats.serial_steps,
                              run.stats.wall_seconds});
      c.plot.rows.push_back({static_cast<long long>(L),
                             "r=" + std::to_string(r), err});
      if (r <= 1000) {
        light_wall += run.stats.wall_seconds;
        any_light = true;
      }
      auto it = expected.find({r, L});
      if (it != expected.end()) {
        any_cell = true;
        double ratio = err / it->second;
        if (ratio < 1.0) ratio = 1.0 / ratio;
        worst_ratio = std::max(worst_ratio, ratio);
        table_ok = table_ok && ratio <= 2.0;
      }
    }
  }

  if (any_cell) {
    c.check("oscillatory-table", table_ok,
            "worst cell off by factor " + param_str(worst_ratio) +
                " (band: factor 2)");
  } else {
    c.skip("oscillatory-table", "no tabulated (r, levels) cells were run");
  }
  if (any_light) {
    c.check("oscillatory-runtime", light_wall < 30.0,
            "r <= 1000 rows took " + param_str(light_wall) + " s (limit 30)");
  } else {
    c.skip("oscillatory-runtime", "no r <= 1000 rows were run");
  }
}

std::vector<std::string> plan_osc(const Ctx& c) {
  int r = c.ilist("r").front();
  OscSetup s = osc_setup(r);
  std::vector<double> dts, etas;
  osc_levels(s, s.max_levels, dts, etas);
  Vec u0 = Vec::Ones(1);
  return plan_lines(make_method(dts, std::vector<int>(dts.size() - 1, 1), etas,
                                Integrator::RK2, 0.0, 1.0, u0, true, 1));
}

// ---------------------------------------------------------------------------
// three_scale_iters: error vs coarse iterations for three separated
// frequencies, against the embedded two-level limit

std::map<std::string, std::string> defaults_three_scale(bool) {
  return {{"omega", "2,20,200"}, {"dT2", "0.6,0.3,0.2"}, {"k1", "3"},
          {"max_k2", "6"},       {"eta1", "0.1"},        {"eta2", "1"},
          {"t_end", "6"}};
}

void run_three_scale(Ctx& c) {
  auto omega_list = c.dlist("omega");
  if (omega_list.size() != 3) {
    throw std::invalid_argument("omega must list exactly three frequencies");
  }
  std::array<double, 3> omega{omega_list[0], omega_list[1], omega_list[2]};
  int k1 = c.i("k1"), max_k2 = c.i("max_k2");
  double eta1 = c.d("eta1"), eta2 = c.d("eta2"), t_end = c.d("t_end");
  if (k1 < 1 || max_k2 < 1) {
    throw std::invalid_argument("k1 and max_k2 must be >= 1");
  }

  ProblemParams pp;
  pp.omega = omega;
  ProblemSpec p = make_problem(ProblemId::ThreeScale, pp);
  Vec u0 = default_initial(ProblemId::ThreeScale, pp);
  Complex exact2 = three_scale_exact(omega, u0, t_end)(1);

  c.table.header = {"dT2",          "k2",           "error", "embedded_error",
                    "serial_steps", "wall_seconds"};
  c.plot.header = {"x", "series", "y"};

  double total_wall = 0.0;
  std::map<double, std::vector<double>> seqs;
  std::map<double, double> limits;

  for (double dT2 : c.dlist("dT2")) {
    std::vector<double> dts{dT2, dT2 / 10.0, dT2 / 100.0};
    double span = t_end;
    int n_top = static_cast<int>(std::llround(span / dT2));
    if (!near_integer(span / dT2) || n_top < 1) {
      throw std::invalid_argument("t_end must be a multiple of each dT2");
    }

    // embedded two-level limit: the inner solve applied serially slice by
    // slice over the coarsest grid
    auto start_e = Clock::now();
    Vec u = u0;
    for (int n = 0; n < n_top; ++n) {
      MethodConfig inner = make_method(
          {dts[1], dts[2]}, {k1}, {eta1}, Integrator::RK2, n * dT2,
          (n + 1) * dT2, u, true, c.opt->workers);
      u = solve_multilevel(inner, p).final_trajectory().back();
    }
    double e2l = std::abs(u(1) - exact2);
    total_wall += seconds_since(start_e);
    limits[dT2] = e2l;

    MethodConfig cfg = make_method(dts, {max_k2, k1}, {eta2, eta1},
                                   Integrator::RK2, 0.0, t_end, u0, true,
                                   c.opt->workers);
    PararealRun run = solve_multilevel(cfg, p);
    total_wall += run.stats.wall_seconds;
    std::string series = "ΔT=" + param_str(dT2);
    for (int k2 = 1; k2 <= max_k2; ++k2) {
      double err = std::abs(run.iterates[k2].back()(1) - exact2);
      seqs[dT2].push_back(err);
      c.table.rows.push_back({dT2, static_cast<long long>(k2), err, e2l,
                              steps_total(dts, {k2, k1}, t_end),
                              run.stats.wall_seconds});
      c.plot.rows.push_back({static_cast<long long>(k2), series, err});
    }
  }

  bool dflt = c.is_default({"omega", "k1", "eta1", "eta2", "t_end"});
  auto it = seqs.find(0.3);
  if (dflt && it != seqs.end() && max_k2 >= 6) {
    const auto& e = it->second;
    double e2l = limits.at(0.3);
    bool ok = true;
    // decreasing, allowing the plateau: an iterate may sit below the
    // two-level limit and bounce within 5% of it without counting as growth
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      ok = ok && (e[i + 1] <= e[i] || e[i + 1] <= 1.05 * e2l);
    }
    double final_ratio = e.back() / e2l;
    ok = ok && std::abs(final_ratio - 1.0) <= 0.05;
    c.check("three-scale-plateau", ok,
            "final/two-level error ratio = " + param_str(final_ratio) +
                " (must lie within 5%), sequence decreasing up to the "
                "plateau");
  } else {
    c.skip("three-scale-plateau",
           "needs the default configuration including dT2=0.3 and max_k2>=6");
  }
  c.check("three-scale-runtime", total_wall < 60.0,
          "sweep took " + param_str(total_wall) + " s (limit 60)");
}

std::vector<std::string> plan_three_scale(const Ctx& c) {
  double dT2 = c.dlist("dT2").front();
  Vec u0 = Vec::Ones(3);
  return plan_lines(make_method({dT2, dT2 / 10.0, dT2 / 100.0},
                                {c.i("max_k2"), c.i("k1")},
                                {c.d("eta2"), c.d("eta1")}, Integrator::RK2,
                                0.0, c.d("t_end"), u0, true, 1));
}

// ---------------------------------------------------------------------------
// spring_windows: swinging-spring error vs iterations for several averaging
// windows, three-level tracked against two-level

std::map<std::string, std::string> defaults_spring(bool) {
  const double pi = std::numbers::pi;
  return {{"omega_r", param_str(pi)},
          {"omega_z", param_str(2.0 * pi)},
          {"lambda", "1"},
          {"amplitude", "0.1"},
          {"t_end", "50"},
          {"coarse_dt", "5"},
          {"mid_dt", "0.5"},
          {"fine_dt", "0.05"},
          {"eta_top", "2"},
          {"eta1", "2,0.75,0.2"},
          {"k1", "2"},
          {"max_k", "5"},
          {"ref_dt", "0.001"}};
}

void run_spring(Ctx& c) {
  SpringParams sp{c.d("omega_r"), c.d("omega_z"), c.d("lambda")};
  double a = c.d("amplitude"), t_end = c.d("t_end");
  double dt2 = c.d("coarse_dt"), dt1 = c.d("mid_dt"), dt0 = c.d("fine_dt");
  double eta_top = c.d("eta_top");
  int k1 = c.i("k1"), max_k = c.i("max_k");
  std::vector<double> eta1s = c.dlist("eta1");

  ProblemParams pp;
  pp.spring = sp;
  ProblemSpec p = make_problem(ProblemId::Spring, pp);
  Vec u_phys = Vec::Zero(6);
  u_phys(0) = a;
  u_phys(2) = a;
  u_phys(4) = a;
  Vec w0 = spring_to_modulation(sp, u_phys);

  Trajectory ref = reference_solution(p, w0, {0.0, t_end}, c.d("ref_dt"));
  Complex u1_ref = spring_to_physical(p, sp, t_end, ref.back())(0);

  c.table.header = {"variant",      "eta1",        "k", "error", "ratio",
                    "serial_steps", "wall_seconds"};
  c.plot.header = {"x", "series", "y"};

  auto u1_error = [&](const Vec& w) {
    return std::abs(spring_to_physical(p, sp, t_end, w)(0) - u1_ref);
  };

  // two-level baseline
  std::vector<double> dts2{dt2, dt0};
  MethodConfig cfg2 = make_method(dts2, {max_k}, {eta_top}, Integrator::RK2,
                                  0.0, t_end, w0, true, c.opt->workers);
  PararealRun run2 = solve_multilevel(cfg2, p);
  std::vector<double> err2;
  for (int k = 1; k <= max_k; ++k) {
    double err = u1_error(run2.iterates[k].back());
    err2.push_back(err);
    c.table.rows.push_back({std::string("two_level"), eta_top,
                            static_cast<long long>(k), err, 1.0,
                            steps_total(dts2, {k}, t_end),
                            run2.stats.wall_seconds});
    c.plot.rows.push_back({static_cast<long long>(k),
                           std::string("two-level"), err});
  }

  // three-level runs, one per window length
  std::vector<double> dts3{dt2, dt1, dt0};
  std::map<double, std::vector<double>> err3;
  for (double eta1 : eta1s) {
    MethodConfig cfg3 =
        make_method(dts3, {max_k, k1}, {eta_top, eta1}, Integrator::RK2, 0.0,
                    t_end, w0, true, c.opt->workers);
    PararealRun run3 = solve_multilevel(cfg3, p);
    std::string series = "three-level eta1=" + param_str(eta1);
    for (int k = 1; k <= max_k; ++k) {
      double err = u1_error(run3.iterates[k].back());
      err3[eta1].push_back(err);
      c.table.rows.push_back({std::string("three_level"), eta1,
                              static_cast<long long>(k), err,
                              err / err2[k - 1],
                              steps_total(dts3, {k, k1}, t_end),
                              run3.stats.wall_seconds});
      c.plot.rows.push_back({static_cast<long long>(k), series, err});
    }
  }

  bool dflt = c.is_default({"omega_r", "omega_z", "lambda", "amplitude",
                            "t_end", "coarse_dt", "mid_dt", "fine_dt",
                            "eta_top", "k1", "ref_dt"});
  if (dflt && max_k >= 5) {
    const double frozen[] = {6.5804909528e-04, 4.2895713908e-06,
                             1.4135702165e-06, 9.7584199564e-07,
                             9.7680758884e-07};
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      worst = std::max(worst, std::abs(err2[k] / frozen[k] - 1.0));
    }
    c.check("spring-two-level-values", worst <= 1e-6,
            "max relative deviation from pinned two-level errors = " +
                param_str(worst) + " (tolerance 1e-6)");
  } else {
    c.skip("spring-two-level-values", "non-default configuration");
  }

  auto wide = err3.find(eta_top);
  if (dflt && wide != err3.end()) {
    double worst = 0.0;
    for (int k = 0; k < max_k; ++k) {
      worst = std::max(worst, std::abs(wide->second[k] / err2[k] - 1.0));
    }
    c.check("spring-window-tracking", worst <= 0.2,
            "wide-window three-level strays from two-level by at most " +
                param_str(worst) + " (tolerance 0.2)");
  } else {
    c.skip("spring-window-tracking",
           "needs eta1 to include the top window length");
  }

  bool desc = eta1s.size() >= 2;
  for (std::size_t i = 0; i + 1 < eta1s.size(); ++i) {
    desc = desc && eta1s[i] > eta1s[i + 1];
  }
  if (desc && max_k >= 2) {
    bool ok = true;
    std::string seq;
    for (std::size_t i = 0; i < eta1s.size(); ++i) {
      double e = err3.at(eta1s[i])[1];  // second iteration
      if (i > 0) {
        ok = ok && e > err3.at(eta1s[i - 1])[1];
        seq += " < ";
      }
      seq = seq.empty() ? param_str(e) : seq + param_str(e);
    }
    c.check("spring-window-ordering", ok,
            "iteration-2 errors grow as the window shrinks: " + seq);
  } else {
    c.skip("spring-window-ordering",
           "needs a descending eta1 list and max_k >= 2");
  }
}

std::vector<std::string> plan_spring(const Ctx& c) {
  Vec u0 = Vec::Ones(6);
  return plan_lines(make_method(
      {c.d("coarse_dt"), c.d("mid_dt"), c.d("fine_dt")},
      {c.i("max_k"), c.i("k1")}, {c.d("eta_top"), c.dlist("eta1").front()},
      Integrator::RK2, 0.0, c.d("t_end"), u0, true, 1));
}

// ---------------------------------------------------------------------------
// rotating shallow water experiments

struct RsweCommon {
  SpectralGrid grid;
  ProblemSpec p;
  Vec u0;
  Vec ref;
  double t_end;
  double fine_dt;

  RsweCommon(const Ctx& c, double F)
      : grid(c.i("modes")),
        p(),
        u0(),
        ref(),
        t_end(c.d("t_end")),
        fine_dt(c.d("fine_dt")) {
    RsweParams rp;
    rp.epsilon = c.d("epsilon");
    rp.F = F;
    rp.mu = c.d("mu");
    rp.t_end = t_end;
    rp.dealias = c.i("dealias") != 0;
    p = build_rswe(rp, grid);
    u0 = rswe_initial_condition(grid);
    ref = reference_solution(p, u0, {0.0, t_end}, fine_dt, Integrator::Strang)
              .back();
  }

  double error(const Vec& w) const {
    return rswe_relative_linf(p, grid, w, ref, t_end);
  }
};

std::map<std::string, std::string> defaults_rswe_f1(bool heavy) {
  return {{"modes", heavy ? "128" : "32"},
          {"epsilon", "0.1"},
          {"F", "1"},
          {"mu", "0.0001"},
          {"t_end", heavy ? "48" : "4.8"},
          {"fine_dt", "0.0005"},
          {"n_three", heavy ? "10,20" : "20"},
          {"k1", "3"},
          {"max_k2", "5"},
          {"n_two", "40"},
          {"k_two", "2"},
          {"dealias", "0"}};
}

void run_rswe_f1(Ctx& c) {
  auto start = Clock::now();
  RsweCommon rc(c, c.d("F"));
  int k1 = c.i("k1"), max_k2 = c.i("max_k2");
  int n_two = c.i("n_two"), k_two = c.i("k_two");

  c.table.header = {"variant", "n",           "k",
                    "error",   "serial_steps", "wall_seconds"};
  c.plot.header = {"x", "series", "y"};

  std::map<int, std::vector<double>> three_errs;
  for (int N : c.ilist("n_three")) {
    // level steps grow by the coarsening factor: dT1 = N dt0, dT2 = N dT1
    double dT1 = N * rc.fine_dt;
    double dT2 = N * dT1;
    std::vector<double> dts{dT2, dT1, rc.fine_dt};
    MethodConfig cfg =
        make_method(dts, {max_k2, k1}, {dT2, dT1}, Integrator::Strang, 0.0,
                    rc.t_end, rc.u0, true, c.opt->workers);
    PararealRun run = solve_multilevel(cfg, rc.p);
    std::string series = "three-level N=" + std::to_string(N);
    for (int k2 = 1; k2 <= max_k2; ++k2) {
      double err = rc.error(run.iterates[k2].back());
      three_errs[N].push_back(err);
      c.table.rows.push_back({std::string("three_level"),
                              static_cast<long long>(N),
                              static_cast<long long>(k2), err,
                              steps_total(dts, {k2, k1}, rc.t_end),
                              run.stats.wall_seconds});
      c.plot.rows.push_back({static_cast<long long>(k2), series, err});
    }
  }

  std::vector<double> two_errs;
  {
    std::vector<double> dts{n_two * rc.fine_dt, rc.fine_dt};
    MethodConfig cfg = make_method(dts, {k_two}, {dts[0]}, Integrator::Strang,
                                   0.0, rc.t_end, rc.u0, true,
                                   c.opt->workers);
    PararealRun run = solve_multilevel(cfg, rc.p);
    for (int k = 1; k <= k_two; ++k) {
      double err = rc.error(run.iterates[k].back());
      two_errs.push_back(err);
      c.table.rows.push_back({std::string("two_level"),
                              static_cast<long long>(n_two),
                              static_cast<long long>(k), err,
                              steps_total(dts, {k}, rc.t_end),
                              run.stats.wall_seconds});
      c.plot.rows.push_back({static_cast<long long>(k),
                             "two-level N=" + std::to_string(n_two), err});
    }
  }
  double total_wall = seconds_since(start);

  auto all_finite = [](const std::vector<double>& seq) {
    for (double e : seq) {
      if (!std::isfinite(e)) return false;
    }
    return true;
  };

  bool dflt = c.is_default({"epsilon", "F", "mu", "fine_dt", "k1", "n_two",
                            "k_two", "dealias"});
  if (c.opt->heavy) {
    auto it = three_errs.find(20);
    if (dflt && c.is_default({"modes", "t_end"}) && it != three_errs.end() &&
        max_k2 >= 5) {
      bool mono = all_finite(it->second);
      for (int i = 0; i + 1 < 5; ++i) {
        mono = mono && it->second[i + 1] < it->second[i];
      }
      c.check("rswe-three-level-monotone", mono,
              "N=20 errors over the first five iterations: " +
                  [&] {
                    std::string s;
                    for (int i = 0; i < 5; ++i) {
                      s += (i ? ", " : "") + param_str(it->second[i]);
                    }
                    return s;
                  }());
      const double pinned = 1.7963565539455182e-05;
      double e2 = two_errs.size() >= 2 ? two_errs[1] : two_errs.back();
      double factor = e2 > pinned ? e2 / pinned : pinned / e2;
      c.check("rswe-two-level-band", all_finite(two_errs) && factor <= 3.0,
              "two-level N=40 second-iteration error " + param_str(e2) +
                  " is factor " + param_str(factor) +
                  " from the published value (band: 3)");
    } else {
      c.skip("rswe-three-level-monotone", "non-default heavy configuration");
      c.skip("rswe-two-level-band", "non-default heavy configuration");
    }
    c.skip("rswe-smoke", "running the full-size configuration");
    c.skip("rswe-smoke-runtime", "running the full-size configuration");
  } else {
    bool conv = all_finite(two_errs);
    for (const auto& [n, seq] : three_errs) {
      conv = conv && all_finite(seq) && seq.back() < seq.front();
    }
    c.check("rswe-smoke", conv,
            conv ? "errors finite and decreasing from first to last "
                   "iteration"
                 : "non-finite or non-decreasing iteration errors");
    c.check("rswe-smoke-runtime", total_wall < 30.0,
            "smoke run took " + param_str(total_wall) + " s (limit 30)");
    c.skip("rswe-three-level-monotone", "requires --heavy");
    c.skip("rswe-two-level-band", "requires --heavy");
  }
}

std::vector<std::string> plan_rswe_f1(const Ctx& c) {
  int N = c.ilist("n_three").front();
  double t_end = c.d("t_end");
  double dT1 = N * c.d("fine_dt"), dT2 = N * dT1;
  Vec u0 = Vec::Ones(3 * c.i("modes"));
  return plan_lines(make_method({dT2, dT1, c.d("fine_dt")},
                                {c.i("max_k2"), c.i("k1")}, {dT2, dT1},
                                Integrator::Strang, 0.0, t_end, u0, true, 1));
}

std::map<std::string, std::string> defaults_rswe_f100(bool heavy) {
  return {{"modes", heavy ? "128" : "32"},
          {"epsilon", "0.1"},
          {"F", "0.01"},
          {"mu", "0.0001"},
          {"t_end", heavy ? "45" : "4.5"},
          {"fine_dt", "0.0005"},
          {"n", heavy ? "10,20,30" : "10"},
          {"k1", "3"},
          {"max_k2", heavy ? "5" : "2"},
          {"dealias", "0"}};
}

void run_rswe_f100(Ctx& c) {
  RsweCommon rc(c, c.d("F"));
  int k1 = c.i("k1"), max_k2 = c.i("max_k2");

  c.table.header = {"n", "k2", "error", "serial_steps", "wall_seconds"};
  c.plot.header = {"x", "series", "y"};

  bool ok = true;
  std::string detail;
  for (int N : c.ilist("n")) {
    double dT1 = N * rc.fine_dt;
    double dT2 = N * dT1;
    std::vector<double> dts{dT2, dT1, rc.fine_dt};
    MethodConfig cfg =
        make_method(dts, {max_k2, k1}, {dT2, dT1}, Integrator::Strang, 0.0,
                    rc.t_end, rc.u0, true, c.opt->workers);
    PararealRun run = solve_multilevel(cfg, rc.p);
    std::vector<double> seq;
    for (int k2 = 1; k2 <= max_k2; ++k2) {
      double err = rc.error(run.iterates[k2].back());
      seq.push_back(err);
      c.table.rows.push_back({static_cast<long long>(N),
                              static_cast<long long>(k2), err,
                              steps_total(dts, {k2, k1}, rc.t_end),
                              run.stats.wall_seconds});
      c.plot.rows.push_back({static_cast<long long>(k2),
                             "N=" + std::to_string(N), err});
    }
    bool this_ok = std::isfinite(seq.back()) &&
                   (max_k2 < 2 || seq.back() < seq.front());
    ok = ok && this_ok;
    detail += (detail.empty() ? "" : "; ") + ("N=" + std::to_string(N)) +
              ": " + param_str(seq.front()) + " -> " + param_str(seq.back());
  }
  c.check("rswe-f100-converges", ok,
          "iteration error shrinks for every coarsening factor (" + detail +
              ")");
}

std::vector<std::string> plan_rswe_f100(const Ctx& c) {
  int N = c.ilist("n").front();
  double t_end = c.d("t_end");
  double dT1 = N * c.d("fine_dt"), dT2 = N * dT1;
  Vec u0 = Vec::Ones(3 * c.i("modes"));
  return plan_lines(make_method({dT2, dT1, c.d("fine_dt")},
                                {c.i("max_k2"), c.i("k1")}, {dT2, dT1},
                                Integrator::Strang, 0.0, t_end, u0, true, 1));
}

// ---------------------------------------------------------------------------
// complexity_tables: serial-step tables and the coarsening-factor model

std::map<std::string, std::string> defaults_complexity(bool) {
  return {{"max_k", "5"}};
}

void run_complexity(Ctx& c) {
  int max_k = c.i("max_k");
  c.table.header = {"table", "param", "value", "wall_seconds"};

  auto add_steps = [&](const std::string& name, const std::vector<int>& slices,
                       std::vector<int> iters, int which,
                       std::vector<long long>* got) {
    for (int k = 1; k <= max_k; ++k) {
      iters[which] = k;
      long long v = serial_steps(slices, iters).total;
      if (got) got->push_back(v);
      c.table.rows.push_back({name, static_cast<long long>(k), v, 0.0});
    }
  };

  std::vector<long long> two, three, sw3;
  add_steps("two_level_steps", {10, 100}, {1}, 0, &two);
  add_steps("three_level_steps", {10, 10, 10}, {1, 2}, 0, &three);
  long long sw2 = serial_steps({2400, 40}, {2}).total;
  c.table.rows.push_back(
      {std::string("sw_two_level_steps"), 2LL, sw2, 0.0});
  add_steps("sw_three_level_steps", {100, 30, 30}, {1, 3}, 0, &sw3);

  c.table.rows.push_back({std::string("v_cycle_model"), 3LL,
                          v_cycle_steps(3, 10, 1000), 0.0});
  c.table.rows.push_back({std::string("v_cycle_model"), 2LL,
                          v_cycle_steps(2, 10, 1000), 0.0});
  CoarseningReport r2 = optimal_coarsening(2, 1e4);
  CoarseningReport r3 = optimal_coarsening(3, 1e3);
  c.table.rows.push_back(
      {std::string("optimal_coarsening"), 2LL, r2.n_opt, 0.0});
  c.table.rows.push_back(
      {std::string("optimal_coarsening"), 3LL, r3.n_opt, 0.0});

  bool ok = true;
  std::string bad;
  auto expect = [&](const std::vector<long long>& got,
                    std::vector<long long> want, const char* label) {
    for (std::size_t i = 0; i < want.size() && i < got.size(); ++i) {
      if (got[i] != want[i]) {
        ok = false;
        bad += std::string(label) + "[k=" + std::to_string(i + 1) +
               "]=" + std::to_string(got[i]) + " (expected " +
               std::to_string(want[i]) + ") ";
      }
    }
  };
  expect(two, {120, 230, 340, 450, 560}, "two_level");
  expect(three, {70, 130, 190, 250, 310}, "three_level");
  if (sw2 != 7280) {
    ok = false;
    bad += "sw_two_level=" + std::to_string(sw2) + " (expected 7280) ";
  }
  std::vector<long long> sw3_want;
  for (int k = 1; k <= max_k; ++k) sw3_want.push_back(310LL * k + 100);
  expect(sw3, sw3_want, "sw_three_level");
  c.check("step-count-integers", ok,
          ok ? "all serial-step tables match exactly" : bad);

  bool model_ok = v_cycle_steps(3, 10, 1000) == 50 &&
                  v_cycle_steps(2, 10, 1000) == 210 &&
                  std::abs(r2.n_opt - std::sqrt(2e4)) <= 1e-9 * std::sqrt(2e4);
  model_ok = model_ok && r2.f_floor >= v_cycle_cost(2, r2.n_opt, 1e4) &&
             r2.f_ceil >= v_cycle_cost(2, r2.n_opt, 1e4);
  c.check("coarsening-model", model_ok,
          "cost model values and optimal coarsening factor are consistent");
}

std::vector<std::string> plan_complexity(const Ctx&) {
  return {"(analytic step tables; no multilevel cycle is executed)"};
}

// ---------------------------------------------------------------------------
// registry

struct Def {
  const char* id;
  const char* summary;
  std::map<std::string, std::string> (*defaults)(bool heavy);
  void (*run)(Ctx&);
  std::vector<std::string> (*plan)(const Ctx&);
};

const Def kRegistry[] = {
    {"decay_levels",
     "error vs level count on the scalar decay problem (fixed coarsest step)",
     defaults_decay, run_decay, plan_decay},
    {"oscillatory_sweep",
     "error table over frequency r and level count for w' = -exp(irt) w^2",
     defaults_osc, run_osc, plan_osc},
    {"three_scale_iters",
     "error vs coarse iterations against the embedded two-level limit (three "
     "frequencies)",
     defaults_three_scale, run_three_scale, plan_three_scale},
    {"spring_windows",
     "swinging-spring error vs iterations for several averaging windows",
     defaults_spring, run_spring, plan_spring},
    {"rswe_f1",
     "rotating shallow water (F=1) multilevel convergence vs the fine serial "
     "reference",
     defaults_rswe_f1, run_rswe_f1, plan_rswe_f1},
    {"rswe_f100",
     "rotating shallow water (F=1/100) three-level convergence for several "
     "coarsening factors",
     defaults_rswe_f100, run_rswe_f100, plan_rswe_f100},
    {"complexity_tables",
     "serial-step tables and the V-cycle cost model with its optimal "
     "coarsening factor",
     defaults_complexity, run_complexity, plan_complexity},
};

const Def* find_def(const std::string& id) {
  for (const Def& d : kRegistry) {
    if (id == d.id) return &d;
  }
  return nullptr;
}

const Def& require_def(const std::string& id) {
  const Def* d = find_def(id);
  if (!d) {
    std::string known;
    for (const Def& e : kRegistry) {
      known += known.empty() ? e.id : std::string(", ") + e.id;
    }
    throw std::invalid_argument("unknown experiment id '" + id +
                                "' (known: " + known + ")");
  }
  return *d;
}

Ctx make_ctx(const Def& def, const RunOptions& opt) {
  Ctx c;
  c.defaults = def.defaults(opt.heavy);
  c.cfg = c.defaults;
  for (const auto& [key, value] : opt.overrides) {
    if (!c.cfg.count(key)) {
      std::string known;
      for (const auto& [k, v] : c.cfg) {
        known += known.empty() ? k : ", " + k;
      }
      throw std::invalid_argument("unknown override key '" + key + "' for " +
                                  def.id + " (valid: " + known + ")");
    }
    c.cfg[key] = value;
  }
  c.opt = &opt;
  return c;
}

}  // namespace

bool ExperimentResult::checks_passed() const {
  for (const auto& ch : checks) {
    if (!ch.skipped && !ch.passed) return false;
  }
  return true;
}

std::vector<std::string> experiment_ids() {
  std::vector<std::string> out;
  for (const Def& d : kRegistry) out.push_back(d.id);
  return out;
}

bool has_experiment(const std::string& id) { return find_def(id) != nullptr; }

std::string experiment_summary(const std::string& id) {
  return require_def(id).summary;
}

std::map<std::string, std::string> experiment_defaults(const std::string& id,
                                                       bool heavy) {
  return require_def(id).defaults(heavy);
}

ExperimentResult run_experiment(const std::string& id, const RunOptions& opt) {
  const Def& def = require_def(id);
  if (opt.workers < 1) throw std::invalid_argument("workers must be >= 1");
  Ctx c = make_ctx(def, opt);
  auto start = Clock::now();
  def.run(c);
  ExperimentResult res;
  res.id = id;
  res.table = std::move(c.table);
  res.plot = std::move(c.plot);
  res.checks = std::move(c.checks);
  res.wall_seconds = seconds_since(start);
  if (!opt.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    write_csv((fs::path(opt.out_dir) / (id + ".csv")).string(), res.table);
    if (!res.plot.header.empty()) {
      write_csv((fs::path(opt.out_dir) / (id + "_plot.csv")).string(),
                res.plot);
    }
  }
  return res;
}

std::vector<std::string> experiment_plan(const std::string& id,
                                         const RunOptions& opt) {
  const Def& def = require_def(id);
  Ctx c = make_ctx(def, opt);
  return def.plan(c);
}

}  // namespace mlp
