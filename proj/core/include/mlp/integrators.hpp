#pragma once

// Fixed-step one-step integrators: explicit midpoint (RK2) and Strang
// splitting (exact diffusion half-flows around an RK2 substep). OneStep
// binds an integrator to a level's RHS (plain or averaged modulation RHS)
// with private scratch, so instances can run on worker threads.

#include "mlp/averaging.hpp"
#include "mlp/core.hpp"

namespace mlp {

// y_{n+1} = y_n + h f(t + h/2, y_n + (h/2) f(t, y_n));
// f callable as f(t, y, out, ws). out must not alias y.
template <class Rhs>
void rk2_step(Rhs&& f, double t, double h, const Vec& y, Vec& out,
              RhsWorkspace& ws, Vec& k, Vec& ymid) {
  f(t, y, k, ws);
  ymid = y + (0.5 * h) * k;
  f(t + 0.5 * h, ymid, k, ws);
  out = y + h * k;
}

// scalar variant for inlined hot loops; f callable as f(t, y) -> Complex
template <class Rhs>
inline Complex rk2_step_scalar(const Rhs& f, double t, double h, Complex y) {
  Complex k1 = f(t, y);
  Complex ym = y + 0.5 * h * k1;
  Complex k2 = f(t + 0.5 * h, ym);
  return y + h * k2;
}

// One step of a level's integrator. The RHS is the plain modulation RHS
// (avg == nullptr) or an averaged one; for Strang the diffusion symbol is
// applied exactly as exp(d h/2) factors and excluded from the RHS.
class OneStep {
 public:
  OneStep(const ProblemSpec& p, const LevelSpec& spec,
          std::shared_ptr<const AveragedRhs> avg);

  void step(double t, const Vec& y, Vec& out);
  double dt() const { return spec_.dt; }
  const LevelSpec& level() const { return spec_; }

  long long rhs_calls() const { return ws_.evals; }
  long long steps_taken() const { return steps_; }
  void reset_counters() { ws_.evals = 0; steps_ = 0; }

 private:
  void rhs(double t, const Vec& y, Vec& out);

  const ProblemSpec* p_;
  LevelSpec spec_;
  std::shared_ptr<const AveragedRhs> avg_;
  Eigen::ArrayXd half_flow_; // exp(d dt/2), Strang with diffusion only
  RhsWorkspace ws_;
  Vec k_, ymid_, stage_;
  long long steps_ = 0;
};

// serial fixed-step integration across [t0, t0 + n*stepper.dt()]
void integrate_n(OneStep& stepper, double t0, int n, const Vec& y0, Vec& out);

} // namespace mlp
