#pragma once

// 1D pseudo-spectral machinery on the 2*pi-periodic domain and the rotating
// shallow water problem built on it. Spectral states hold unnormalized
// forward-transform coefficients (hat_k = sum_j f_j exp(-i k x_j)); physical
// samples are recovered by the normalized inverse transform.
//
// The shallow-water state stacks the coefficients of (v1, v2, h) as
// component f*modes + k. Per wavenumber the linear part is the 3x3 block
//   [[0, -1, i k F^-1/2], [1, 0, 0], [i k F^-1/2, 0, 0]]
// (skew-Hermitian), and the nonlinearity -(v1 v1_x, v1 v2_x, (h v1)_x) is
// evaluated pseudo-spectrally. The hyperviscosity written as +mu d^4/dx^4 in
// the equations has the exponentially unstable symbol +mu k^4; it is
// implemented with the dissipative symbol -mu k^4, i.e. read as standard
// stabilizing hyperviscosity, which matches its stated purpose.

#include "mlp/core.hpp"

namespace mlp {

struct SpectralGrid {
  int modes = 128;
  std::vector<double> k;  // FFT ordering 0..m/2-1, -m/2..-1
  std::vector<double> kd; // same with the Nyquist mode zeroed (odd derivatives)
  std::vector<double> x;  // collocation points 2*pi*j/m

  explicit SpectralGrid(int modes = 128);
};

struct RsweParams {
  double epsilon = 0.1; // Rossby number
  double F = 1.0;       // Burger-number parameter
  double mu = 1e-4;     // hyperviscosity coefficient (0 disables)
  double t_end = 48.0;  // horizon: 48 at F = 1, 45 at F = 1/100
  bool dealias = false; // optional 2/3-rule truncation of the nonlinearity
};

ProblemSpec build_rswe(const RsweParams& params, const SpectralGrid& grid);

// height profile with max |h| = 1 and zero mean (constants fixed on a 16x
// oversampled grid), v1 = v2 = 0
Vec rswe_initial_condition(const SpectralGrid& grid);

// multiply mode k by ik, Nyquist zeroed
void spectral_derivative(const SpectralGrid& grid, const Vec& field_hat,
                         Vec& out);

// normalized inverse transform of one field (length modes)
Vec to_physical(const SpectralGrid& grid, const Vec& field_hat);
// unnormalized forward transform of real samples
Vec to_spectral(const SpectralGrid& grid, const Eigen::VectorXd& field);
// spectral interpolation onto a factor-times-finer grid (real part)
Eigen::VectorXd oversampled_physical(const SpectralGrid& grid,
                                     const Vec& field_hat, int factor);

// max-abs difference of all physical fields over max-abs of the reference,
// both states mapped to the physical frame at time t
double rswe_relative_linf(const ProblemSpec& p, const SpectralGrid& grid,
                          const Vec& w, const Vec& w_ref, double t);

} // namespace mlp
