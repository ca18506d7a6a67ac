#pragma once

// Temporal averaging of the modulation right-hand side over a window eta:
//   f_avg(t, w) = (1/eta) integral rho(s/eta) f(t+s, w) ds
// with a C-infinity bump kernel supported on (-1/2, 1/2), discretized by
// Gauss-Legendre quadrature.

#include "mlp/core.hpp"

namespace mlp {

// rho(s) = exp(1/((s-1/2)(s+1/2))) / rho0 on (-1/2,1/2), 0 outside;
// rho0 makes the integral one.
double kernel_value(double s);
double kernel_normalization(); // rho0, computed once at first use

struct QuadratureRule {
  std::vector<double> x; // nodes in (-1, 1)
  std::vector<double> w; // weights, sum = 2
};

// Gauss-Legendre rule, Newton-on-recurrence construction, cached per n.
const QuadratureRule& gauss_legendre(int n);

// Node offsets s_m in (-eta/2, eta/2) and folded coefficients
// c_m = w_m * rho(s_m/eta) / 2, so that sum_m c_m * g(s_m) approximates
// (1/eta) integral rho(s/eta) g(s) ds and sum_m c_m ~ 1.
struct AveragingWeights {
  std::vector<double> s;
  std::vector<double> c;
};
AveragingWeights averaging_weights(double eta, int nodes);

// Number of quadrature nodes needed to resolve the fastest phase
// omega_max * eta / eps across the window, with safety margin.
int nodes_for_window(double omega_max, double eta, double epsilon, int base);

// Discrete damping multiplier sum_m c_m e^{i r s_m}; |.| <= 1 + tol and
// -> 1 as r*eta -> 0. Converged values need nodes ~ r*eta/2 + margin.
Complex damping_factor(double r, double eta, int nodes);

// Averaged modulation RHS. Per-node linear flows are precomputed at
// construction (phase vectors for diagonal operators, small flow matrices
// for block operators), so one evaluation costs one outer flow pair plus
// `nodes` nonlinearity evaluations. A diffusion symbol is s-independent and
// is added outside the quadrature sum, hence passes through exactly; for a
// zero linear operator the whole RHS is s-independent and the evaluation
// reduces to the plain RHS exactly.
class AveragedRhs {
 public:
  AveragedRhs(const ProblemSpec& p, double eta, int nodes,
              bool with_diffusion = true);

  void eval(double t, const Vec& w, Vec& out, RhsWorkspace& ws) const;
  int nodes() const { return static_cast<int>(weights_.s.size()); }
  double eta() const { return eta_; }

 private:
  const ProblemSpec* p_;
  double eta_;
  bool with_diffusion_;
  AveragingWeights weights_;
  // Diagonal operator: phase_[m] = exp(+s_m L / eps) as elementwise factors
  std::vector<Vec> phase_;
  // Block operator: flow_[m][b] = exp(+s_m B_b / eps)
  std::vector<std::vector<Mat>> flow_;
};

} // namespace mlp
