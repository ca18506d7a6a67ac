#include "mlp/averaging.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace mlp {

static double bump_raw(double s) {
  if (s <= -0.5 || s >= 0.5) return 0.0;
  return std::exp(1.0 / ((s - 0.5) * (s + 0.5)));
}

double kernel_normalization() {
  static const double rho0 = [] {
    const QuadratureRule& q = gauss_legendre(64);
    double sum = 0.0;
    for (size_t i = 0; i < q.x.size(); ++i)
      sum += q.w[i] * bump_raw(0.5 * q.x[i]) * 0.5;
    return sum;
  }();
  return rho0;
}

double kernel_value(double s) { return bump_raw(s) / kernel_normalization(); }

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  QuadratureRule q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev-like initial guess
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one polishing step, then stop
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / dp;
        break;
      }
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.x[i] = -x; // ascending order, symmetric
    q.w[i] = w;
    q.x[n - 1 - i] = x;
    q.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.x[n / 2] = 0.0;
  return cache.emplace(n, std::move(q)).first->second;
}

AveragingWeights averaging_weights(double eta, int nodes) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  const QuadratureRule& q = gauss_legendre(nodes);
  AveragingWeights aw;
  aw.s.resize(nodes);
  aw.c.resize(nodes);
  for (int m = 0; m < nodes; ++m) {
    aw.s[m] = 0.5 * eta * q.x[m];
    aw.c[m] = 0.5 * q.w[m] * kernel_value(0.5 * q.x[m]);
  }
  return aw;
}

int nodes_for_window(double omega_max, double eta, double epsilon, int base) {
  double phase = omega_max * eta / (2.0 * epsilon);
  long long need = static_cast<long long>(std::ceil(phase)) + 50;
  return static_cast<int>(std::max<long long>(base, need));
}

Complex damping_factor(double r, double eta, int nodes) {
  AveragingWeights aw = averaging_weights(eta, nodes);
  Complex sum(0.0, 0.0);
  for (size_t m = 0; m < aw.s.size(); ++m) {
    double ph = r * aw.s[m];
    sum += aw.c[m] * Complex(std::cos(ph), std::sin(ph));
  }
  return sum;
}

AveragedRhs::AveragedRhs(const ProblemSpec& p, double eta, int nodes,
                         bool with_diffusion)
    : p_(&p), eta_(eta), with_diffusion_(with_diffusion) {
  weights_ = averaging_weights(eta, nodes);
  int M = this->nodes();
  switch (p.L.kind()) {
    case LinearOperator::Kind::Zero:
      break; // s-independent RHS, no flows needed
    case LinearOperator::Kind::Diagonal: {
      phase_.resize(M);
      const Vec& d = p.L.diagonal_entries();
      for (int m = 0; m < M; ++m) {
        phase_[m].resize(p.dim);
        double tau = weights_.s[m] / p.epsilon;
        for (int j = 0; j < p.dim; ++j) {
          double ph = tau * d[j].imag();
          phase_[m][j] = Complex(std::cos(ph), std::sin(ph));
        }
      }
      break;
    }
    case LinearOperator::Kind::BlockDiagonal: {
      flow_.resize(M);
      for (int m = 0; m < M; ++m) {
        double tau = weights_.s[m] / p.epsilon;
        flow_[m].resize(p.L.num_blocks());
        for (int b = 0; b < p.L.num_blocks(); ++b)
          flow_[m][b] = p.L.block_exp(b, tau);
      }
      break;
    }
  }
}

void AveragedRhs::eval(double t, const Vec& w, Vec& out, RhsWorkspace& ws) const {
  const ProblemSpec& p = *p_;
  if (!ws.nonlin) ws.nonlin = p.nonlinearity;
  const int M = nodes();

  if (p.L.is_zero()) {
    // whole RHS is s-independent: averaging returns it exactly
    ++ws.evals;
    ws.nonlin(w, out);
    if (with_diffusion_ && p.diffusion.size() > 0)
      out.array() += p.diffusion.array().cast<Complex>() * w.array();
    return;
  }

  ws.evals += M;
  // g = exp(-tL/eps) w once; per node only the cheap cached s_m-flow moves
  apply_linear_flow(p.L, p.epsilon, t, w, ws.a, Direction::Forward);
  Vec& g = ws.a;
  Vec& u = ws.b;
  Vec& nl = ws.c;
  Vec& acc = ws.d;
  acc.setZero(p.dim);
  nl.resize(p.dim);
  u.resize(p.dim);

  if (p.L.kind() == LinearOperator::Kind::Diagonal) {
    for (int m = 0; m < M; ++m) {
      const Vec& ph = phase_[m];
      u.array() = g.array() * ph.array().conjugate();
      ws.nonlin(u, nl);
      acc.array() += weights_.c[m] * nl.array() * ph.array();
    }
  } else {
    for (int m = 0; m < M; ++m) {
      const auto& Fm = flow_[m];
      for (int b = 0; b < p.L.num_blocks(); ++b) {
        const auto& idx = p.L.block_indices(b);
        int sz = static_cast<int>(idx.size());
        Eigen::VectorXcd xb(sz);
        for (int i = 0; i < sz; ++i) xb[i] = g[idx[i]];
        Eigen::VectorXcd yb = Fm[b].adjoint() * xb; // exp(-s_m B/eps)
        for (int i = 0; i < sz; ++i) u[idx[i]] = yb[i];
      }
      ws.nonlin(u, nl);
      for (int b = 0; b < p.L.num_blocks(); ++b) {
        const auto& idx = p.L.block_indices(b);
        int sz = static_cast<int>(idx.size());
        Eigen::VectorXcd xb(sz);
        for (int i = 0; i < sz; ++i) xb[i] = nl[idx[i]];
        Eigen::VectorXcd yb = Fm[b] * xb; // exp(+s_m B/eps)
        for (int i = 0; i < sz; ++i) acc[idx[i]] += weights_.c[m] * yb[i];
      }
    }
  }

  apply_linear_flow(p.L, p.epsilon, t, acc, out, Direction::Backward);
  if (with_diffusion_ && p.diffusion.size() > 0)
    out.array() += p.diffusion.array().cast<Complex>() * w.array();
}

} // namespace mlp
