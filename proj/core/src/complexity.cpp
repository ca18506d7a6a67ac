#include "mlp/complexity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlp {

namespace {

long long ipow_checked(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (1ll << 62) / base)
      throw std::overflow_error("ipow_checked: value does not fit 64 bits");
    r *= base;
  }
  return r;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i)
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

} // namespace

StepCount serial_steps(const std::vector<int>& slices,
                       const std::vector<int>& iters) {
  const int L = static_cast<int>(slices.size());
  if (L < 1 || static_cast<int>(iters.size()) != L - 1)
    throw std::invalid_argument(
        "serial_steps: need one slice count per level and one iteration "
        "count per coarse level");
  StepCount sc;
  sc.per_level.assign(static_cast<size_t>(L), 0);
  long long mult = 1;  // critical-path visits of the stage at each level
  long long emult = 1; // executed instances of the stage
  long long executed = 0;
  for (int l = 0; l + 1 < L; ++l) {
    const long long n = slices[l];
    const long long k = iters[l];
    if (n < 1 || slices[l + 1] < 1 || (n > 1 && k < 1))
      throw std::invalid_argument("serial_steps: invalid slice or iteration "
                                  "count");
    if (n == 1) continue; // single slice: one fine propagation, no sweeps
    sc.per_level[l] = mult * n * (1 + k);
    executed += emult * n * (1 + k);
    mult *= k;
    emult *= n * k;
  }
  sc.per_level[L - 1] = mult * slices[L - 1];
  executed += emult * slices[L - 1];
  for (long long v : sc.per_level) sc.total += v;
  sc.rhs_evals = 2 * executed;
  return sc;
}

StepCount serial_steps(const MethodConfig& cfg) {
  if (cfg.levels.empty())
    throw std::invalid_argument("serial_steps: config needs levels");
  const int L = static_cast<int>(cfg.levels.size());
  std::vector<int> slices(static_cast<size_t>(L));
  std::vector<int> iters(static_cast<size_t>(L - 1));
  slices[0] = static_cast<int>(
      std::llround((cfg.t_end - cfg.t0) / cfg.levels[0].dt));
  for (int l = 1; l < L; ++l)
    slices[l] = static_cast<int>(
        std::llround(cfg.levels[l - 1].dt / cfg.levels[l].dt));
  for (int l = 0; l + 1 < L; ++l) iters[l] = cfg.levels[l].iterations;
  return serial_steps(slices, iters);
}

long long v_cycle_steps(int L, long long N, long long X) {
  if (L < 1) throw std::invalid_argument("v_cycle_steps: L must be >= 1");
  if (X < 1) throw std::invalid_argument("v_cycle_steps: X must be >= 1");
  if (L == 1) return X;
  if (N < 2) throw std::invalid_argument("v_cycle_steps: N must be >= 2");
  const long long denom = ipow_checked(N, L - 1);
  if (X % denom != 0)
    throw std::invalid_argument(
        "v_cycle_steps: X must be divisible by N^(L-1)");
  return 2ll * (L - 2) * N + N + 2ll * (X / denom);
}

double v_cycle_cost(int L, double N, double X) {
  if (L < 1) throw std::invalid_argument("v_cycle_cost: L must be >= 1");
  if (L == 1) return X;
  if (!(N > 1.0)) throw std::invalid_argument("v_cycle_cost: N must exceed 1");
  return 2.0 * (L - 2) * N + N + 2.0 * X / std::pow(N, L - 1);
}

CoarseningReport optimal_coarsening(int L, double X) {
  if (L < 2) throw std::invalid_argument("optimal_coarsening: L must be >= 2");
  if (!(X > 0.0))
    throw std::invalid_argument("optimal_coarsening: X must be positive");
  CoarseningReport r;
  r.n_opt = std::pow(X + X / (2.0 * L - 3.0), 1.0 / L);
  r.n_floor = static_cast<long long>(std::floor(r.n_opt));
  if (r.n_floor < 2) r.n_floor = 2;
  r.n_ceil = static_cast<long long>(std::ceil(r.n_opt));
  if (r.n_ceil < r.n_floor) r.n_ceil = r.n_floor;
  r.f_floor = v_cycle_cost(L, static_cast<double>(r.n_floor), X);
  r.f_ceil = v_cycle_cost(L, static_cast<double>(r.n_ceil), X);
  return r;
}

namespace {

// max over omega >= omega0 of |eps/omega| kappa(eps, eta, omega); the
// default kappa == 1 puts the maximum at the floor, a general kappa is
// scanned on a geometric grid spanning ~18 decades
double window_max_term(const BoundParams& p, double eta) {
  if (!p.kappa) return std::abs(p.epsilon / p.omega0);
  double best = 0.0;
  double w = p.omega0;
  for (int j = 0; j <= 60; ++j, w *= 2.0)
    best = std::max(best,
                    std::abs(p.epsilon / w) * p.kappa(p.epsilon, eta, w));
  return best;
}

void check_bound_sizes(const BoundParams& p, bool averaged) {
  const size_t n = p.dT.size();
  auto need = [n](size_t got, const char* what) {
    if (got != n)
      throw std::invalid_argument(std::string("bound params: ") + what +
                                  " needs one entry per coarse level");
  };
  if (n == 0)
    throw std::invalid_argument("bound params: at least one coarse level");
  need(p.k.size(), "k");
  need(p.C1.size(), "C1");
  need(p.C2.size(), "C2");
  need(p.C3.size(), "C3");
  need(p.p.size(), "p");
  if (averaged) need(p.eta.size(), "eta");
  if (p.N < 1)
    throw std::invalid_argument("bound params: N must be positive");
}

} // namespace

BoundReport multilevel_bound(const BoundParams& p, bool averaged) {
  check_bound_sizes(p, averaged);
  const size_t n = p.dT.size();
  BoundReport r;
  r.alpha.resize(n);
  r.beta.resize(n);
  r.gamma.resize(n);
  r.E.resize(n);
  r.A.resize(n);
  r.contributions.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double dTp = std::pow(p.dT[i], p.p[i] + 1);
    double a = p.C1[i] * dTp;
    double g = p.C3[i] * dTp;
    if (averaged) {
      const double mx = window_max_term(p, p.eta[i]);
      a = p.C1[i] * p.eta[i] * p.epsilon + p.C1[i] * dTp * mx;
      g = p.C3[i] * p.eta[i] * p.epsilon * p.M1_norm +
          p.C3[i] * dTp * mx * p.M0_norm;
    }
    const double b = 1.0 + p.C2[i] * p.dT[i];
    r.alpha[i] = a;
    r.beta[i] = b;
    r.gamma[i] = g;
    const double bin = binom(p.N, p.k[i] + 1);
    r.E[i] = bin * g * std::pow(a, p.k[i]) * std::pow(b, p.N - p.k[i] - 1);
    // amplification with alpha_{0N} at the conservative upper endpoint
    r.A[i] = p.N * std::pow(b, p.N - 1) * std::pow(1.0 + a, p.N - 1);
  }
  r.delta0 = p.c * p.dT[0] * std::pow(p.dT0, p.p0);
  double amp = 1.0; // running product of A_j for j above the current level
  for (size_t i = n; i-- > 0;) {
    r.contributions[i] = r.E[i] * amp;
    amp *= r.A[i];
  }
  r.guess_term = r.delta0 * amp;
  r.total = r.guess_term;
  for (double cb : r.contributions) r.total += cb;
  return r;
}

double corollary_bound(const BoundParams& p) {
  check_bound_sizes(p, false);
  for (size_t i = 1; i < p.k.size(); ++i)
    if (p.k[i] != p.k[0])
      throw std::invalid_argument(
          "corollary_bound: iteration count must be uniform across levels");
  if (!(p.T > 0.0))
    throw std::invalid_argument("corollary_bound: horizon T must be positive");
  const int L = static_cast<int>(p.dT.size()) + 1; // levels including fine
  const int k = p.k[0];
  const int pc = p.p[0];
  const double C1 = p.C1[0], C2 = p.C2[0], C3 = p.C3[0];
  const double dT1 = p.dT[0];
  const double rN = 1.0 / static_cast<double>(p.N);
  const double geo_beta = (1.0 - std::pow(rN, L)) / (1.0 - rN);
  const double geo_alpha = (1.0 - std::pow(rN, static_cast<double>(L) *
                                                    (pc + 1))) /
                           (1.0 - std::pow(rN, pc + 1));
  const double term1 =
      p.c * p.T * std::pow(p.dT0, p.p0) *
      std::exp(C2 * p.T * geo_beta +
               C1 * p.T * std::pow(dT1, pc) * geo_alpha);
  const double expo2 = C2 * p.T / (1.0 - rN) +
                       C1 * p.T * dT1 / (1.0 - std::pow(rN, pc + 1));
  const int q = k * pc + k + pc; // note q + 1 = (k+1)(pc+1)
  const double term2 = std::exp(expo2) * C3 * std::pow(C1, k) *
                       binom(p.N, k + 1) *
                       (1.0 / (1.0 - std::pow(rN, q))) * std::pow(dT1, q + 1);
  return term1 + term2;
}

} // namespace mlp
