#include "mlp/parareal.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace mlp {

// ---------------------------------------------------------------------------
// WorkerPool

WorkerPool::WorkerPool(int workers) : workers_(workers < 1 ? 1 : workers) {
  threads_.reserve(static_cast<size_t>(workers_ - 1));
  for (int s = 1; s < workers_; ++s)
    threads_.emplace_back([this, s] { worker_loop(s); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
    ++generation_;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run_slot(int slot) {
  const long long lo = static_cast<long long>(count_) * slot / workers_;
  const long long hi = static_cast<long long>(count_) * (slot + 1) / workers_;
  for (long long i = lo; i < hi; ++i)
    (*fn_)(static_cast<int>(i), slot);
}

void WorkerPool::worker_loop(int slot) {
  long long seen = 0;
  for (;;) {
    {
      std::unique_lock<std::mutex> lk(mu_);
      cv_.wait(lk, [&] { return generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    run_slot(slot);
    {
      std::lock_guard<std::mutex> lk(mu_);
      --pending_;
    }
    cv_done_.notify_one();
  }
}

void WorkerPool::parallel_for(int count,
                              const std::function<void(int, int)>& fn) {
  if (count <= 0) return;
  if (workers_ == 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  {
    std::lock_guard<std::mutex> lk(mu_);
    fn_ = &fn;
    count_ = count;
    pending_ = workers_ - 1;
    ++generation_;
  }
  cv_.notify_all();
  run_slot(0);
  std::unique_lock<std::mutex> lk(mu_);
  cv_done_.wait(lk, [&] { return pending_ == 0; });
  fn_ = nullptr;
}

// ---------------------------------------------------------------------------
// Sweep primitives

std::string CyclePlanEntry::to_string() const {
  std::string s = action + "@" + std::to_string(level);
  if (parallel) s += " (parallel)";
  return s;
}

Trajectory coarse_sweep(const PropagatorHandle& G, double t0, double t_end,
                        const Vec& u0) {
  const int n = static_cast<int>(std::llround((t_end - t0) / G.slice_length));
  Trajectory tr;
  tr.times.resize(static_cast<size_t>(n) + 1);
  tr.states.resize(static_cast<size_t>(n) + 1);
  tr.times[0] = t0;
  tr.states[0] = u0;
  for (int i = 0; i < n; ++i) {
    tr.times[i + 1] = t0 + (i + 1) * G.slice_length;
    G(tr.times[i], tr.states[i], tr.states[i + 1]);
  }
  return tr;
}

std::vector<Vec> fine_sweep_parallel(const PropagatorHandle& P,
                                     const Trajectory& trajectory,
                                     WorkerPool& pool) {
  const int n = trajectory.size() - 1;
  std::vector<Vec> out(static_cast<size_t>(n > 0 ? n : 0));
  if (n <= 0) return out;
  const bool fan_out =
      pool.size() > 1 && static_cast<int>(P.lanes.size()) >= pool.size();
  if (!fan_out) {
    for (int i = 0; i < n; ++i)
      P.lanes[0](trajectory.times[i], trajectory.states[i], out[i]);
    return out;
  }
  pool.parallel_for(n, [&](int i, int slot) {
    P.lanes[slot](trajectory.times[i], trajectory.states[i], out[i]);
  });
  return out;
}

Trajectory parareal_correct(const PropagatorHandle& G,
                            const std::vector<Vec>& fine_results,
                            const Trajectory& prev, const Vec& u0,
                            std::vector<Vec>* g_cache) {
  const int n = prev.size() - 1;
  if (static_cast<int>(fine_results.size()) != n)
    throw std::invalid_argument("parareal_correct: fine_results length "
                                "must equal the slice count");
  if (g_cache && static_cast<int>(g_cache->size()) != n + 1)
    throw std::invalid_argument("parareal_correct: g_cache length must equal "
                                "the node count");
  Trajectory next;
  next.times = prev.times;
  next.states.resize(static_cast<size_t>(n) + 1);
  next.states[0] = u0;
  Vec g_new, g_old;
  for (int i = 0; i < n; ++i) {
    G(prev.times[i], next.states[i], g_new);
    if (g_cache) {
      next.states[i + 1] = g_new + fine_results[i] - (*g_cache)[i + 1];
      (*g_cache)[i + 1] = g_new; // becomes G(old node) for the next sweep
    } else {
      G(prev.times[i], prev.states[i], g_old);
      next.states[i + 1] = g_new + fine_results[i] - g_old;
    }
  }
  return next;
}

// ---------------------------------------------------------------------------
// Multilevel engine

namespace {

int slice_ratio(double span, double dt) {
  return static_cast<int>(std::llround(span / dt));
}

class MultilevelEngine {
 public:
  MultilevelEngine(const ProblemSpec& p, const MethodConfig& cfg)
      : p_(p), cfg_(cfg), pool_(cfg.workers) {
    const int L = static_cast<int>(cfg.levels.size());
    avg_.resize(static_cast<size_t>(L));
    if (cfg.averaging_enabled) {
      for (int i = 0; i + 1 < L; ++i) {
        const LevelSpec& lv = cfg.levels[i];
        const double eta = lv.window();
        const int nodes = nodes_for_window(p.L.max_frequency(), eta,
                                           p.epsilon, cfg.quadrature_nodes);
        const bool with_diff = lv.integrator == Integrator::RK2;
        avg_[i] = std::make_shared<const AveragedRhs>(p, eta, nodes, with_diff);
      }
    }
    stepper_.resize(static_cast<size_t>(L));
    for (int i = 0; i + 1 < L; ++i)
      stepper_[i] = std::make_unique<OneStep>(p, cfg.levels[i], avg_[i]);
    fine_.reserve(static_cast<size_t>(pool_.size()));
    for (int s = 0; s < pool_.size(); ++s)
      fine_.push_back(std::make_unique<OneStep>(p, cfg.levels[L - 1], nullptr));
  }

  PararealRun solve() {
    const int L = static_cast<int>(cfg_.levels.size());
    const int n_top = slice_ratio(cfg_.t_end - cfg_.t0, cfg_.levels[0].dt);
    const auto start = std::chrono::steady_clock::now();
    PararealRun run = recurse(0, cfg_.t0, n_top, cfg_.initial_condition, true);
    run.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    run.stats.level_steps.assign(static_cast<size_t>(L), 0);
    for (int i = 0; i + 1 < L; ++i) {
      run.stats.level_steps[i] = stepper_[i]->steps_taken();
      run.stats.rhs_evals += stepper_[i]->rhs_calls();
    }
    for (const auto& f : fine_) {
      run.stats.level_steps[L - 1] += f->steps_taken();
      run.stats.rhs_evals += f->rhs_calls();
    }
    return run;
  }

 private:
  // one coarse step advances one slice of level i
  PropagatorHandle coarse_handle(int i) {
    PropagatorHandle h;
    h.level = static_cast<int>(cfg_.levels.size()) - 1 - i;
    h.dt = cfg_.levels[i].dt;
    h.slice_length = cfg_.levels[i].dt;
    h.serial_steps_per_slice = 1;
    OneStep* st = stepper_[static_cast<size_t>(i)].get();
    h.lanes.push_back(
        [st](double t, const Vec& u, Vec& out) { st->step(t, u, out); });
    return h;
  }

  // fine propagation across one slice of level i: serial integration of the
  // finest level (one lane per worker slot) or a nested Parareal solve on
  // levels i+1.. (single lane, so the nested sweeps stay serial)
  PropagatorHandle fine_handle(int i) {
    const int L = static_cast<int>(cfg_.levels.size());
    PropagatorHandle h;
    h.level = L - 2 - i;
    h.dt = cfg_.levels[i + 1].dt;
    h.slice_length = cfg_.levels[i].dt;
    const int n = slice_ratio(cfg_.levels[i].dt, cfg_.levels[i + 1].dt);
    if (i + 1 == L - 1) {
      h.serial_steps_per_slice = n;
      for (auto& f : fine_) {
        OneStep* st = f.get();
        h.lanes.push_back([st, n](double t, const Vec& u, Vec& out) {
          integrate_n(*st, t, n, u, out);
        });
      }
    } else {
      h.serial_steps_per_slice = 0; // resolved per sweep via child_serial_
      h.lanes.push_back([this, i, n](double t, const Vec& u, Vec& out) {
        PararealRun sub = recurse(i + 1, t, n, u, false);
        child_serial_ = sub.stats.serial_steps;
        out = sub.iterates.back().states.back();
      });
    }
    return h;
  }

  long long child_serial(const PropagatorHandle& P) const {
    return P.serial_steps_per_slice > 0 ? P.serial_steps_per_slice
                                        : child_serial_;
  }

  // Parareal on levels i.. over [t0, t0 + n_slices * dt_i]; record keeps the
  // per-iteration trajectories (top level only — nested solves return just
  // their final trajectory)
  PararealRun recurse(int i, double t0, int n_slices, const Vec& u0,
                      bool record) {
    PararealRun run;
    const PropagatorHandle P = fine_handle(i);
    const double t_end = t0 + n_slices * cfg_.levels[i].dt;

    if (n_slices == 1) {
      // a single slice needs no correction: one fine propagation is already
      // the converged value, so the coarse sweep and corrections are skipped
      Trajectory tr;
      tr.times = {t0, t_end};
      tr.states.resize(2);
      tr.states[0] = u0;
      P(t0, u0, tr.states[1]);
      run.iterates.push_back(std::move(tr));
      run.stats.serial_steps = child_serial(P);
      return run;
    }

    const PropagatorHandle G = coarse_handle(i);
    long long serial = 0;
    Trajectory traj = coarse_sweep(G, t0, t_end, u0);
    serial += n_slices;
    // the guess satisfies U^0_{n+1} = G(T_n, U^0_n), so its nodes double as
    // the initial G-cache
    std::vector<Vec> g_cache = traj.states;
    if (record) run.iterates.push_back(traj);
    const int k = cfg_.levels[i].iterations;
    for (int it = 0; it < k; ++it) {
      std::vector<Vec> fine_results = fine_sweep_parallel(P, traj, pool_);
      serial += child_serial(P);
      traj = parareal_correct(G, fine_results, traj, u0, &g_cache);
      serial += n_slices;
      if (record) run.iterates.push_back(traj);
    }
    if (!record) run.iterates.push_back(std::move(traj));
    run.stats.serial_steps = serial;
    return run;
  }

  const ProblemSpec& p_;
  MethodConfig cfg_;
  WorkerPool pool_;
  std::vector<std::shared_ptr<const AveragedRhs>> avg_;
  std::vector<std::unique_ptr<OneStep>> stepper_; // coarse levels, serial use
  std::vector<std::unique_ptr<OneStep>> fine_;    // finest level, one per slot
  long long child_serial_ = 0;
};

void plan_level(const MethodConfig& cfg, int i, int depth,
                std::vector<CyclePlanEntry>& out) {
  const int L = static_cast<int>(cfg.levels.size());
  const int label = L - 1 - i;
  // guess and fine sweeps of nested solves run concurrently across the
  // parent's slices; corrections are each task's sequential closing phase
  out.push_back({"guess", label, depth > 0});
  for (int it = 0; it < cfg.levels[static_cast<size_t>(i)].iterations; ++it) {
    if (i + 1 == L - 1)
      out.push_back({"fine", 0, depth > 0});
    else
      plan_level(cfg, i + 1, depth + 1, out);
    out.push_back({"correct", label, false});
  }
}

} // namespace

// ---------------------------------------------------------------------------
// Entry points

PararealRun solve_multilevel(const MethodConfig& cfg, const ProblemSpec& p) {
  validate_config(cfg, p);
  if (cfg.levels.size() < 2)
    throw std::invalid_argument(
        "solve_multilevel: configuration needs at least two levels");
  MultilevelEngine engine(p, cfg);
  return engine.solve();
}

PararealRun solve_two_level(const MethodConfig& cfg, const ProblemSpec& p) {
  if (cfg.levels.size() != 2)
    throw std::invalid_argument(
        "solve_two_level: configuration must have exactly two levels");
  return solve_multilevel(cfg, p);
}

std::vector<CyclePlanEntry> cycle_plan(const MethodConfig& cfg) {
  std::vector<CyclePlanEntry> out;
  if (cfg.levels.empty()) return out;
  if (cfg.levels.size() == 1) {
    out.push_back({"fine", 0, false});
    return out;
  }
  plan_level(cfg, 0, 0, out);
  return out;
}

Trajectory serial_integrate(const ProblemSpec& p, const LevelSpec& spec,
                            double t0, const Vec& u0,
                            const std::vector<double>& record_times) {
  OneStep st(p, spec, nullptr);
  Trajectory tr;
  tr.times = record_times;
  tr.states.resize(record_times.size());
  Vec cur = u0, next(u0.size());
  long long step = 0;
  for (size_t m = 0; m < record_times.size(); ++m) {
    const double target = record_times[m];
    const long long goal = std::llround((target - t0) / spec.dt);
    const double hit = t0 + static_cast<double>(goal) * spec.dt;
    if (std::abs(hit - target) > 1e-9 * std::max(1.0, std::abs(target)) ||
        goal < step)
      throw std::invalid_argument(
          "serial_integrate: record times must be ascending multiples of dt");
    for (; step < goal; ++step) {
      st.step(t0 + static_cast<double>(step) * spec.dt, cur, next);
      std::swap(cur, next);
    }
    tr.states[m] = cur;
  }
  return tr;
}

} // namespace mlp
