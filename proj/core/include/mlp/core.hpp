#pragma once

// Core state types for highly oscillatory systems
//   u'(t) = -(1/eps) L u + N(u),   L skew-Hermitian,
// and their modulation form w = exp(+tL/eps) u,
//   w'(t) = exp(+tL/eps) N(exp(-tL/eps) w)  [+ d .* w for a diffusion symbol
// d that commutes with L].

#include <Eigen/Core>
#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlp {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Linear operator kept in forms whose matrix exponential is exact:
// zero, diagonal with purely imaginary entries, or a set of small dense
// skew-Hermitian blocks (eigendecomposed once at construction).
class LinearOperator {
 public:
  enum class Kind { Zero, Diagonal, BlockDiagonal };

  LinearOperator() : kind_(Kind::Zero), dim_(0) {}

  static LinearOperator zero(int dim);
  // entries must be purely imaginary (tolerance 1e-12 relative)
  static LinearOperator diagonal(const Vec& entries);
  // each (indices, B) pair: B acts on state entries indices[0..m-1];
  // B must be skew-Hermitian; index sets must be disjoint and cover [0, dim)
  static LinearOperator block_diagonal(
      int dim, const std::vector<std::pair<std::vector<int>, Mat>>& blocks);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

  // largest |omega| among the eigenvalues i*omega of the operator
  double max_frequency() const { return max_freq_; }

  // out = exp(tau * L) * v  (tau real, exact up to roundoff)
  void apply_exp(double tau, const Vec& v, Vec& out) const;

  // dense block exponential exp(tau * B_b) for block b (BlockDiagonal only);
  // used to precompute quadrature-node flow matrices
  Mat block_exp(int b, double tau) const;
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<int>& block_indices(int b) const { return blocks_[b].idx; }

  const Vec& diagonal_entries() const { return diag_; }

 private:
  struct Block {
    std::vector<int> idx;
    Mat V;               // unitary eigenvectors of H = -iB
    Eigen::VectorXd lam; // real eigenvalues of H, so B = i V diag(lam) V^H
  };

  Kind kind_;
  int dim_;
  Vec diag_;                  // Diagonal: entries i*omega_j
  std::vector<Block> blocks_; // BlockDiagonal
  double max_freq_ = 0.0;
};

// Problem in the canonical frame u' = -(1/eps) L u + N(u).
struct ProblemSpec {
  std::string name;
  int dim = 0;
  double epsilon = 1.0;
  LinearOperator L;
  // nonlinearity N(u); must be safe to call concurrently with distinct
  // (u, out) pairs. Implementations needing scratch provide a factory below.
  std::function<void(const Vec& u, Vec& out)> nonlinearity;
  // optional per-component diffusion symbol d (real, e.g. -mu*k^4); empty
  // means none. Must commute with L (constant within each block).
  Eigen::VectorXd diffusion;
  // fresh nonlinearity instance with private scratch, for worker threads;
  // null means `nonlinearity` is stateless and can be shared
  std::function<std::function<void(const Vec&, Vec&)>()> nonlinearity_factory;
  uint64_t content_hash = 0; // identifies problem + parameters for caching

  std::function<void(const Vec&, Vec&)> thread_nonlinearity() const {
    return nonlinearity_factory ? nonlinearity_factory() : nonlinearity;
  }
};

enum class Direction {
  Forward, // exp(-tL/eps): solution flow of the stiff linear part
  Backward // exp(+tL/eps): its inverse
};

// out = exp(-+ tL/eps) v
void apply_linear_flow(const LinearOperator& op, double epsilon, double t,
                       const Vec& v, Vec& out, Direction dir);

// Scratch for modulation-RHS evaluation (avoids allocating in hot loops).
// One instance per worker thread; never shared.
struct RhsWorkspace {
  Vec a, b, c, d;
  std::function<void(const Vec&, Vec&)> nonlin; // per-thread instance
  long long evals = 0;
};

// w' = exp(+tL/eps) N(exp(-tL/eps) w) [+ d .* w if with_diffusion]
void modulation_rhs(const ProblemSpec& p, double t, const Vec& w, Vec& out,
                    RhsWorkspace& ws, bool with_diffusion = true);

enum class Integrator { RK2, Strang };

// One level of the hierarchy. Levels are indexed coarsest = highest index
// downward to finest = 0; dt of a coarser level is an integer multiple of
// the next finer dt.
struct LevelSpec {
  int level = 0;
  double dt = 0.0;
  double eta = 0.0;        // averaging window; <= 0 means "use dt"
  int iterations = 1;      // parareal iterations run at this level
  Integrator integrator = Integrator::RK2;

  double window() const { return eta > 0.0 ? eta : dt; }
};

struct MethodConfig {
  std::vector<LevelSpec> levels; // ordered coarse -> fine
  double t0 = 0.0;
  double t_end = 1.0;
  Vec initial_condition;
  bool averaging_enabled = true;
  int quadrature_nodes = 32; // base count; assembly scales it per window
  int workers = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;

  int size() const { return static_cast<int>(times.size()); }
  const Vec& back() const { return states.back(); }
};

// Throws std::invalid_argument describing the first violated constraint:
// nonempty level list, positive dts ordered coarse -> fine with integer
// refinement ratios, span divisible by the coarsest dt, iterations >= 1 on
// corrected levels, positive epsilon, workers >= 1, matching dimensions.
void validate_config(const MethodConfig& cfg, const ProblemSpec& p);

// helpers shared across modules
inline bool near_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

uint64_t fnv1a(const void* data, size_t n, uint64_t seed = 1469598103934665603ull);
uint64_t hash_doubles(std::initializer_list<double> xs, uint64_t seed);
uint64_t hash_string(const std::string& s, uint64_t seed);

} // namespace mlp
