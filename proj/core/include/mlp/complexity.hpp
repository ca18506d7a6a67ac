#pragma once

// Serial-step accounting for the multilevel method, V-cycle cost model with
// its optimal coarsening factor, and evaluators for the a-priori error
// bounds (plain and averaged variants plus the uniform-coarsening closed
// form).

#include "mlp/core.hpp"

#include <functional>

namespace mlp {

struct StepCount {
  // critical-path (serial-equivalent) steps per level, coarse -> fine
  std::vector<long long> per_level;
  long long total = 0;     // sum of per_level
  // executed integrator evaluations across all slices (two per step); an
  // averaged evaluation expands to one base-RHS call per quadrature node
  long long rhs_evals = 0;
};

// critical-path count of a configuration; equals the solver's self-reported
// RunStats.serial_steps
StepCount serial_steps(const MethodConfig& cfg);

// raw-count variant: slices[0] = top-level slice count, slices[l] = slices
// (or fine steps, for l = L-1) per level-(l-1) slice; iters[l] = corrections
// at coarse level l, size L-1
StepCount serial_steps(const std::vector<int>& slices,
                       const std::vector<int>& iters);

// V-cycle cost model: f_1 = X, f_L(N) = 2(L-2)N + N + 2X/N^(L-1); X is the
// total fine-step count and N the uniform coarsening factor
long long v_cycle_steps(int L, long long N, long long X);

// f_L evaluated as a real function (no divisibility constraint)
double v_cycle_cost(int L, double N, double X);

struct CoarseningReport {
  double n_opt = 0.0;      // (X + X/(2L-3))^(1/L), exact minimizer of f_L
  long long n_floor = 0;   // neighboring integers (floor clamped to >= 2)
  long long n_ceil = 0;
  double f_floor = 0.0;    // f_L at the neighbors
  double f_ceil = 0.0;
};

CoarseningReport optimal_coarsening(int L, double X);

// Inputs of the error bounds. Level index l = 1..L-1 counts from the
// next-to-finest level upward, so vector entry 0 describes level 1; level 0
// is the fine propagator (c, dT0, p0).
struct BoundParams {
  std::vector<double> dT;        // coarse steps (Delta T_l)
  std::vector<int> k;            // corrections per level
  std::vector<double> C1;        // truncation constants (alpha)
  std::vector<double> C2;        // Lipschitz constants (beta)
  std::vector<double> C3;        // iteration-zero constants (gamma)
  std::vector<int> p;            // coarse orders p_l
  double c = 1.0 / 6.0;          // fine truncation constant
  double dT0 = 0.0;              // fine step
  int p0 = 2;                    // fine order
  int N = 0;                     // slices per level
  double T = 0.0;                // horizon (closed-form bound only)
  // averaged variant
  std::vector<double> eta;       // averaging windows
  double epsilon = 1.0;
  double omega0 = 1.0;           // frequency floor of the max term
  // spectral damping factor kappa(eps, eta, omega); identically 1 when unset
  std::function<double(double, double, double)> kappa;
  double M0_norm = 1.0;
  double M1_norm = 1.0;
};

struct BoundReport {
  std::vector<double> alpha, beta, gamma; // per level, entry 0 = level 1
  std::vector<double> E;                  // level error terms
  std::vector<double> A;                  // amplification factors
  std::vector<double> contributions;      // E_l * prod_{j>l} A_j
  double delta0 = 0.0;                    // fine-propagator error c dT1 dT0^p0
  double guess_term = 0.0;                // delta0 * prod_l A_l
  double total = 0.0;
};

// e <= sum_l E_l prod_{j>l} A_j + delta0 prod_l A_l, with
//   alpha_l = C1 dT^(p+1),              beta_l = 1 + C2 dT,
//   gamma_l = C3 dT^(p+1),              E_l = C(N, k+1) gamma alpha^k beta^(N-k-1),
//   A_l = N beta^(N-1) (1+alpha)^(N-1)  [alpha_{0N} at its upper endpoint],
// and, when averaged, alpha_l and gamma_l gain the window terms
//   C eta eps (+ ||M1||) and C dT^(p+1) max_{w>=w0} |eps/w| kappa (+ ||M0||).
BoundReport multilevel_bound(const BoundParams& params, bool averaged);

// closed-form geometric-series bound for uniform N and k
double corollary_bound(const BoundParams& params);

} // namespace mlp
