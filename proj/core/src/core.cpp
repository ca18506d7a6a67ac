#include "mlp/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>

namespace mlp {

LinearOperator LinearOperator::zero(int dim) {
  LinearOperator op;
  op.kind_ = Kind::Zero;
  op.dim_ = dim;
  return op;
}

LinearOperator LinearOperator::diagonal(const Vec& entries) {
  LinearOperator op;
  op.kind_ = Kind::Diagonal;
  op.dim_ = static_cast<int>(entries.size());
  op.diag_ = entries;
  double maxf = 0.0;
  for (int j = 0; j < op.dim_; ++j) {
    double re = entries[j].real(), im = entries[j].imag();
    if (std::abs(re) > 1e-12 * std::max(1.0, std::abs(im)))
      throw std::invalid_argument(
          "diagonal linear operator must have purely imaginary entries");
    maxf = std::max(maxf, std::abs(im));
  }
  op.max_freq_ = maxf;
  return op;
}

LinearOperator LinearOperator::block_diagonal(
    int dim, const std::vector<std::pair<std::vector<int>, Mat>>& blocks) {
  LinearOperator op;
  op.kind_ = Kind::BlockDiagonal;
  op.dim_ = dim;
  std::vector<char> seen(dim, 0);
  for (const auto& [idx, B] : blocks) {
    int m = static_cast<int>(idx.size());
    if (B.rows() != m || B.cols() != m)
      throw std::invalid_argument("block size does not match index count");
    for (int i : idx) {
      if (i < 0 || i >= dim || seen[i])
        throw std::invalid_argument("block indices must partition [0, dim)");
      seen[i] = 1;
    }
    double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
    if ((B + B.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("block is not skew-Hermitian");
    // B = i H with H Hermitian; eigendecompose H once
    Mat H = Complex(0, -1) * B;
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    Block blk;
    blk.idx = idx;
    blk.V = es.eigenvectors();
    blk.lam = es.eigenvalues();
    op.max_freq_ = std::max(op.max_freq_, blk.lam.cwiseAbs().maxCoeff());
    op.blocks_.push_back(std::move(blk));
  }
  for (int i = 0; i < dim; ++i)
    if (!seen[i])
      throw std::invalid_argument("block indices must cover every component");
  return op;
}

void LinearOperator::apply_exp(double tau, const Vec& v, Vec& out) const {
  switch (kind_) {
    case Kind::Zero:
      out = v;
      return;
    case Kind::Diagonal: {
      out.resize(dim_);
      for (int j = 0; j < dim_; ++j) {
        // diag_[j] = i*omega: exp(tau*i*omega) via polar form
        double ph = tau * diag_[j].imag();
        out[j] = v[j] * Complex(std::cos(ph), std::sin(ph));
      }
      return;
    }
    case Kind::BlockDiagonal: {
      out.resize(dim_);
      for (const Block& b : blocks_) {
        int m = static_cast<int>(b.idx.size());
        Eigen::VectorXcd x(m);
        for (int i = 0; i < m; ++i) x[i] = v[b.idx[i]];
        Eigen::VectorXcd y = b.V.adjoint() * x;
        for (int i = 0; i < m; ++i) {
          double ph = tau * b.lam[i];
          y[i] *= Complex(std::cos(ph), std::sin(ph));
        }
        x.noalias() = b.V * y;
        for (int i = 0; i < m; ++i) out[b.idx[i]] = x[i];
      }
      return;
    }
  }
}

Mat LinearOperator::block_exp(int b, double tau) const {
  const Block& blk = blocks_[b];
  int m = static_cast<int>(blk.idx.size());
  Eigen::VectorXcd phase(m);
  for (int i = 0; i < m; ++i) {
    double ph = tau * blk.lam[i];
    phase[i] = Complex(std::cos(ph), std::sin(ph));
  }
  return blk.V * phase.asDiagonal() * blk.V.adjoint();
}

void apply_linear_flow(const LinearOperator& op, double epsilon, double t,
                       const Vec& v, Vec& out, Direction dir) {
  double tau = (dir == Direction::Forward ? -t : t) / epsilon;
  op.apply_exp(tau, v, out);
}

void modulation_rhs(const ProblemSpec& p, double t, const Vec& w, Vec& out,
                    RhsWorkspace& ws, bool with_diffusion) {
  ++ws.evals;
  if (!ws.nonlin) ws.nonlin = p.nonlinearity;
  if (p.L.is_zero()) {
    ws.nonlin(w, out);
  } else {
    apply_linear_flow(p.L, p.epsilon, t, w, ws.a, Direction::Forward);
    ws.nonlin(ws.a, ws.b);
    apply_linear_flow(p.L, p.epsilon, t, ws.b, out, Direction::Backward);
  }
  if (with_diffusion && p.diffusion.size() > 0)
    out.array() += p.diffusion.array().cast<Complex>() * w.array();
}

void validate_config(const MethodConfig& cfg, const ProblemSpec& p) {
  if (cfg.levels.empty())
    throw std::invalid_argument("config needs at least one level");
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("epsilon must be positive");
  if (cfg.workers < 1)
    throw std::invalid_argument("workers must be >= 1");
  if (!(cfg.t_end > cfg.t0))
    throw std::invalid_argument("t_end must exceed t0");
  if (cfg.initial_condition.size() != p.dim)
    throw std::invalid_argument("initial condition dimension mismatch");
  if (p.L.dim() != p.dim)
    throw std::invalid_argument("linear operator dimension mismatch");
  if (cfg.quadrature_nodes < 2)
    throw std::invalid_argument("quadrature_nodes must be >= 2");

  const auto& lv = cfg.levels;
  for (size_t i = 0; i < lv.size(); ++i) {
    if (!(lv[i].dt > 0.0))
      throw std::invalid_argument("level dt must be positive");
    if (i + 1 < lv.size() && lv[i].iterations < 1)
      throw std::invalid_argument("corrected levels need iterations >= 1");
  }
  for (size_t i = 0; i + 1 < lv.size(); ++i) {
    double ratio = lv[i].dt / lv[i + 1].dt;
    // ratio 1 is allowed: it makes G and P coincide, which is a useful
    // degenerate case (one correction reproduces the fine-serial solution)
    if (ratio < 1.0 - 1e-9 || !near_integer(ratio))
      throw std::invalid_argument(
          "each coarser dt must be an integer multiple of the finer dt");
  }
  double span = cfg.t_end - cfg.t0;
  if (!near_integer(span / lv.front().dt))
    throw std::invalid_argument("time span must be a multiple of coarsest dt");
}

uint64_t fnv1a(const void* data, size_t n, uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t hash_doubles(std::initializer_list<double> xs, uint64_t seed) {
  uint64_t h = seed;
  for (double x : xs) {
    uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    h = fnv1a(&bits, sizeof bits, h);
  }
  return h;
}

uint64_t hash_string(const std::string& s, uint64_t seed) {
  return fnv1a(s.data(), s.size(), seed);
}

} // namespace mlp
