#include "mlp/integrators.hpp"

namespace mlp {

OneStep::OneStep(const ProblemSpec& p, const LevelSpec& spec,
                 std::shared_ptr<const AveragedRhs> avg)
    : p_(&p), spec_(spec), avg_(std::move(avg)) {
  ws_.nonlin = p.thread_nonlinearity();
  if (spec_.integrator == Integrator::Strang && p.diffusion.size() > 0)
    half_flow_ = (p.diffusion.array() * (0.5 * spec_.dt)).exp();
}

void OneStep::rhs(double t, const Vec& y, Vec& out) {
  // Strang handles diffusion in the half-flows, so the RHS omits it there
  bool with_diffusion = spec_.integrator == Integrator::RK2;
  if (avg_)
    avg_->eval(t, y, out, ws_);
  else
    modulation_rhs(*p_, t, y, out, ws_, with_diffusion);
}

void OneStep::step(double t, const Vec& y, Vec& out) {
  ++steps_;
  double h = spec_.dt;
  if (spec_.integrator == Integrator::RK2 || half_flow_.size() == 0) {
    rhs(t, y, k_);
    ymid_ = y + (0.5 * h) * k_;
    rhs(t + 0.5 * h, ymid_, k_);
    out = y + h * k_;
    return;
  }
  stage_ = y;
  stage_.array() *= half_flow_.cast<Complex>();
  rhs(t, stage_, k_);
  ymid_ = stage_ + (0.5 * h) * k_;
  rhs(t + 0.5 * h, ymid_, k_);
  out = stage_ + h * k_;
  out.array() *= half_flow_.cast<Complex>();
}

void integrate_n(OneStep& stepper, double t0, int n, const Vec& y0, Vec& out) {
  Vec cur = y0;
  double h = stepper.dt();
  for (int i = 0; i < n; ++i) {
    stepper.step(t0 + i * h, cur, out);
    std::swap(cur, out);
  }
  out = cur;
}

} // namespace mlp
