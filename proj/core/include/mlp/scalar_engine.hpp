#pragma once

// Multilevel Parareal specialized to scalar (one-dimensional complex) states
// with a statically bound right-hand side. It mirrors the generic engine's
// arithmetic exactly — same evaluation order, same caching of coarse values,
// same degenerate single-slice handling — but avoids type erasure and
// per-step allocation, which matters for very deep level stacks (the
// level-insensitivity table executes ~1e8 fine steps at 8 levels). Tests pin
// this engine against the generic one on small configurations.

#include "mlp/core.hpp"
#include "mlp/integrators.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mlp {

template <class F>
class ScalarMultilevel {
 public:
  // dts ordered coarse -> fine with integer refinement ratios; one iteration
  // count per coarse level (same order)
  ScalarMultilevel(F rhs, std::vector<double> dts, std::vector<int> iterations)
      : rhs_(std::move(rhs)),
        dt_(std::move(dts)),
        iters_(std::move(iterations)) {
    if (dt_.empty()) throw std::invalid_argument("scalar engine: no levels");
    if (iters_.size() + 1 != dt_.size()) {
      throw std::invalid_argument(
          "scalar engine: need one iteration count per coarse level");
    }
    for (std::size_t i = 0; i + 1 < dt_.size(); ++i) {
      double ratio = dt_[i] / dt_[i + 1];
      if (ratio < 1.0 - 1e-9 || !near_integer(ratio)) {
        throw std::invalid_argument(
            "scalar engine: each coarser dt must be an integer multiple of "
            "the finer dt");
      }
    }
    for (int k : iters_) {
      if (k < 1) {
        throw std::invalid_argument("scalar engine: iterations must be >= 1");
      }
    }
  }

  // nodes of the coarsest grid after the final iteration
  std::vector<Complex> solve(double t0, double t_end, Complex u0) const {
    int n = slice_count(t_end - t0, dt_[0], "span");
    if (dt_.size() == 1) {
      std::vector<Complex> nodes(static_cast<std::size_t>(n) + 1);
      nodes[0] = u0;
      for (int i = 0; i < n; ++i) {
        nodes[i + 1] = rk2_step_scalar(rhs_, t0 + i * dt_[0], dt_[0], nodes[i]);
      }
      return nodes;
    }
    return run_level(0, t0, n, u0);
  }

 private:
  static int slice_count(double span, double dt, const char* what) {
    double r = span / dt;
    if (r < 1.0 - 1e-9 || !near_integer(r)) {
      throw std::invalid_argument(std::string("scalar engine: ") + what +
                                  " is not an integer multiple of dt");
    }
    return static_cast<int>(std::llround(r));
  }

  // one slice of level lvl advanced with everything finer
  Complex advance_fine(std::size_t lvl, double t0, Complex u) const {
    int n = slice_count(dt_[lvl], dt_[lvl + 1], "slice");
    if (lvl + 2 == dt_.size()) {
      double h = dt_[lvl + 1];
      for (int i = 0; i < n; ++i) {
        u = rk2_step_scalar(rhs_, t0 + i * h, h, u);
      }
      return u;
    }
    return run_level(lvl + 1, t0, n, u).back();
  }

  std::vector<Complex> run_level(std::size_t lvl, double t0, int n,
                                 Complex u0) const {
    double dt = dt_[lvl];
    // single slice: guess and correction cancel exactly; apply P once
    if (n == 1) return {u0, advance_fine(lvl, t0, u0)};
    std::vector<Complex> u(static_cast<std::size_t>(n) + 1);
    std::vector<Complex> g(static_cast<std::size_t>(n) + 1);
    std::vector<Complex> fine(static_cast<std::size_t>(n));
    u[0] = u0;
    for (int i = 0; i < n; ++i) {
      u[i + 1] = rk2_step_scalar(rhs_, t0 + i * dt, dt, u[i]);
      g[i + 1] = u[i + 1];
    }
    for (int k = 0; k < iters_[lvl]; ++k) {
      for (int i = 0; i < n; ++i) {
        fine[i] = advance_fine(lvl, t0 + i * dt, u[i]);
      }
      for (int i = 0; i < n; ++i) {
        Complex g_new = rk2_step_scalar(rhs_, t0 + i * dt, dt, u[i]);
        u[i + 1] = g_new + fine[i] - g[i + 1];
        g[i + 1] = g_new;
      }
    }
    return u;
  }

  F rhs_;
  std::vector<double> dt_;
  std::vector<int> iters_;
};

}  // namespace mlp
