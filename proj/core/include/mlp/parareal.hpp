#pragma once

// Multi-level Parareal. One correction at level l is
//   U^{k+1}_{n+1} = G_l(T_n, U^{k+1}_n) + P_l(T_n, U^k_n) - G_l(T_n, U^k_n),
// where G_l is ONE integrator step per slice and the fine propagator P_l is
// the next level's serial integration (two-level stage) or, recursively, a
// full Parareal solve on the finer levels. G values from the previous sweep
// are cached, so each correction costs one coarse sweep. Parallelism is
// across slices within one fine sweep; nested sweeps are flattened so only
// the innermost fine sweep fans out. Every slice's result is a pure function
// of its input, making output identical for any worker count.

#include "mlp/integrators.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

namespace mlp {

class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return workers_; }
  // fn(index, slot) for index in [0, count), slot in [0, size());
  // blocks until all indices are done; fixed contiguous partition
  void parallel_for(int count, const std::function<void(int, int)>& fn);

 private:
  void worker_loop(int slot);
  void run_slot(int slot);

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, cv_done_;
  const std::function<void(int, int)>* fn_ = nullptr;
  int count_ = 0;
  long long generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

// Advances the state across exactly one slice of its level's coarse grid.
// lanes[0] is the default; extra lanes are independent instances with
// private scratch for worker threads. A handle with a single lane forces
// its sweeps serial, which is how nested parallelism stays flattened: only
// the innermost fine propagator gets multiple lanes.
struct PropagatorHandle {
  using Advance = std::function<void(double t0, const Vec& u0, Vec& out)>;
  std::vector<Advance> lanes;
  int level = 0;
  double dt = 0.0;           // internal step size
  double slice_length = 0.0; // parent slice span
  long long serial_steps_per_slice = 0;

  void operator()(double t0, const Vec& u0, Vec& out) const {
    lanes[0](t0, u0, out);
  }
};

struct CyclePlanEntry {
  std::string action; // "guess", "fine", "correct"
  int level = 0;      // 0 = finest
  bool parallel = false;

  std::string to_string() const;
};

struct RunStats {
  long long serial_steps = 0;         // critical-path steps across levels
  std::vector<long long> level_steps; // executed steps per level, coarse->fine
  long long rhs_evals = 0;            // base RHS evaluations incl. quadrature
  double wall_seconds = 0.0;
};

struct PararealRun {
  // trajectory on the coarsest grid after each iteration;
  // iterates[0] is the serial coarse guess, iterates[k] after k corrections
  std::vector<Trajectory> iterates;
  RunStats stats;

  const Trajectory& final_trajectory() const { return iterates.back(); }
  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
};

// serial application of G over all slices of [t0, t_end]
Trajectory coarse_sweep(const PropagatorHandle& G, double t0, double t_end,
                        const Vec& u0);

// element n = P applied to trajectory node n over its slice; fans out over
// min(pool.size(), lanes) workers; result independent of worker count
std::vector<Vec> fine_sweep_parallel(const PropagatorHandle& P,
                                     const Trajectory& trajectory,
                                     WorkerPool& pool);

// One Parareal correction. fine_results[n] = P(T_n, prev_n). g_cache holds
// G(T_n, prev_n) on entry (node-aligned: g_cache[n+1], as produced by the
// previous sweep or the guess) and the new G values on exit; pass nullptr
// to recompute G(prev) explicitly.
Trajectory parareal_correct(const PropagatorHandle& G,
                            const std::vector<Vec>& fine_results,
                            const Trajectory& prev, const Vec& u0,
                            std::vector<Vec>* g_cache);

// Full solvers. Coarse levels use the averaged RHS when averaging_enabled;
// the finest level always integrates the unaveraged modulation RHS.
PararealRun solve_two_level(const MethodConfig& cfg, const ProblemSpec& p);
PararealRun solve_multilevel(const MethodConfig& cfg, const ProblemSpec& p);

// unrolled execution plan (no run)
std::vector<CyclePlanEntry> cycle_plan(const MethodConfig& cfg);

// serial fixed-step reference recording states at given times (each must be
// t0 + integer * spec.dt)
Trajectory serial_integrate(const ProblemSpec& p, const LevelSpec& spec,
                            double t0, const Vec& u0,
                            const std::vector<double>& record_times);

} // namespace mlp
