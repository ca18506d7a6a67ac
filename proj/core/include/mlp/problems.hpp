#pragma once

// Model problems in the canonical oscillatory frame, exact solutions where
// closed forms exist, and a disk-cached serial reference solver.
//
//   decay        x' = -x                            (no oscillation)
//   oscillatory  w' = -exp(irt) w^2                 (single frequency r)
//   three_scale  w_j' = -exp(-i omega_j t) w_j^2    (well-separated scales)
//   spring       swinging spring / elastic pendulum, 6 real components
//
// The spring is stated as the second-order system x'' = A x + N_s(x); it is
// rescaled by S = diag(omega_r, 1, omega_r, 1, omega_z, 1) so its linear
// part becomes exact skew 2x2 blocks [[0, -omega], [omega, 0]] — see
// spring_to_modulation / spring_to_physical for the change of frame.

#include "mlp/core.hpp"
#include "mlp/parareal.hpp"

#include <array>

namespace mlp {

enum class ProblemId { Decay, Oscillatory, ThreeScale, Spring };

struct SpringParams {
  double omega_r = 1.0; // radial (spring) frequency, both horizontal modes
  double omega_z = 2.0; // vertical frequency (2:1 resonance by default)
  double lambda = 0.1;  // coupling strength
};

struct ProblemParams {
  double r = 100.0;                              // oscillatory frequency
  Complex w0{1.0, 0.0};                          // oscillatory initial value
  std::array<double, 3> omega{2.0, 20.0, 200.0}; // three-scale frequencies
  SpringParams spring;
};

ProblemSpec make_problem(ProblemId id, const ProblemParams& params = {});

ProblemSpec decay_problem();
ProblemSpec oscillatory_problem(double r);
ProblemSpec three_scale_problem(const std::array<double, 3>& omega);
ProblemSpec spring_problem(const SpringParams& params);

// default initial state in the modulation frame at t = 0
Vec default_initial(ProblemId id, const ProblemParams& params = {});

Complex decay_exact(double t); // x(0) = 1

// w(t) = r w0 / (-i w0 exp(irt) + i w0 + r); throws on a (near-)singular
// denominator
Complex exact_oscillatory(double r, Complex w0, double t);

// w_j(t) = w_j(0) / (1 + w_j(0) (1 - exp(-i omega_j t)) / (i omega_j))
Vec three_scale_exact(const std::array<double, 3>& omega, const Vec& w0,
                      double t);

// modulation state w(0) = S u for a physical state u at t = 0
Vec spring_to_modulation(const SpringParams& params, const Vec& u_physical);
// physical state u(t) = S^-1 exp(-tL) w(t)
Vec spring_to_physical(const ProblemSpec& p, const SpringParams& params,
                       double t, const Vec& w);

// Serial fine solution sampled on t_grid (whose first entry carries u0),
// disk-cached under a key derived from the problem, initial data, grid, and
// integrator. Each grid time must be t_grid[0] + an integer number of
// dt_ref steps.
Trajectory reference_solution(const ProblemSpec& p, const Vec& u0,
                              const std::vector<double>& t_grid,
                              double dt_ref,
                              Integrator integrator = Integrator::RK2);

} // namespace mlp
