#include "mlp/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace mlp {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kTwoPi = 6.283185307179586476925286766559;

// FFTW's planner is not thread-safe (execution is)
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

// one-shot transform for setup and diagnostics paths
void run_fft(int m, const Complex* src, Complex* dst, int sign) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(m));
  std::memcpy(buf, src, static_cast<size_t>(m) * sizeof(Complex));
  fftw_plan plan = fftw_plan_dft_1d(m, buf, buf, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::memcpy(static_cast<void*>(dst), buf,
              static_cast<size_t>(m) * sizeof(Complex));
  fftw_free(buf);
}

double bump_profile(double x) {
  const double pi = kTwoPi / 2.0;
  return std::exp(-4.0 * (x - pi / 4.0) * (x - pi / 4.0)) *
             std::sin(3.0 * (x - pi / 2.0)) +
         std::exp(-2.0 * (x - pi) * (x - pi)) * std::sin(8.0 * (x - pi));
}

// pseudo-spectral advection terms with persistent plans and scratch; one
// instance per worker thread (via ProblemSpec::nonlinearity_factory)
class RsweNonlinearity {
 public:
  RsweNonlinearity(std::shared_ptr<const SpectralGrid> grid, bool dealias)
      : g_(std::move(grid)), m_(g_->modes), dealias_(dealias) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    in_ = fftw_alloc_complex(static_cast<size_t>(m_));
    out_ = fftw_alloc_complex(static_cast<size_t>(m_));
    fwd_ = fftw_plan_dft_1d(m_, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(m_, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    v1_.resize(m_);
    d1_.resize(m_);
    d2_.resize(m_);
    h_.resize(m_);
    prod_.resize(m_);
    hv_.resize(m_);
  }

  ~RsweNonlinearity() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }

  RsweNonlinearity(const RsweNonlinearity&) = delete;
  RsweNonlinearity& operator=(const RsweNonlinearity&) = delete;

  void operator()(const Vec& u, Vec& out) {
    if (u.size() != 3 * m_)
      throw std::invalid_argument("rswe nonlinearity: wrong state size");
    out.resize(3 * m_);
    const Complex* u1h = u.data();
    const Complex* u2h = u.data() + m_;
    const Complex* hh = u.data() + 2 * m_;
    backward(u1h, v1_);
    backward_deriv(u1h, d1_);
    backward_deriv(u2h, d2_);
    backward(hh, h_);
    prod_ = -v1_.cwiseProduct(d1_);
    forward(prod_, out.data());
    prod_ = -v1_.cwiseProduct(d2_);
    forward(prod_, out.data() + m_);
    prod_ = h_.cwiseProduct(v1_);
    forward(prod_, hv_.data());
    for (int j = 0; j < m_; ++j)
      out(2 * m_ + j) = -kI * g_->kd[static_cast<size_t>(j)] * hv_(j);
    if (dealias_) {
      const double cutoff = static_cast<double>(m_) / 3.0;
      for (int j = 0; j < m_; ++j)
        if (std::abs(g_->k[static_cast<size_t>(j)]) > cutoff)
          out(j) = out(m_ + j) = out(2 * m_ + j) = 0.0;
    }
  }

 private:
  void backward(const Complex* hat, Vec& phys) {
    std::memcpy(in_, hat, static_cast<size_t>(m_) * sizeof(Complex));
    fftw_execute(bwd_);
    const double s = 1.0 / m_;
    const Complex* o = reinterpret_cast<const Complex*>(out_);
    for (int j = 0; j < m_; ++j) phys(j) = s * o[j];
  }

  void backward_deriv(const Complex* hat, Vec& phys) {
    Complex* i = reinterpret_cast<Complex*>(in_);
    for (int j = 0; j < m_; ++j)
      i[j] = kI * g_->kd[static_cast<size_t>(j)] * hat[j];
    fftw_execute(bwd_);
    const double s = 1.0 / m_;
    const Complex* o = reinterpret_cast<const Complex*>(out_);
    for (int j = 0; j < m_; ++j) phys(j) = s * o[j];
  }

  void forward(const Vec& phys, Complex* hat_out) {
    std::memcpy(in_, phys.data(), static_cast<size_t>(m_) * sizeof(Complex));
    fftw_execute(fwd_);
    std::memcpy(static_cast<void*>(hat_out), out_,
                static_cast<size_t>(m_) * sizeof(Complex));
  }

  std::shared_ptr<const SpectralGrid> g_;
  int m_;
  bool dealias_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan fwd_;
  fftw_plan bwd_;
  Vec v1_, d1_, d2_, h_, prod_, hv_;
};

} // namespace

SpectralGrid::SpectralGrid(int m) : modes(m) {
  if (m < 4 || (m & (m - 1)) != 0)
    throw std::invalid_argument(
        "SpectralGrid: modes must be a power of two >= 4");
  k.resize(static_cast<size_t>(m));
  kd.resize(static_cast<size_t>(m));
  x.resize(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    k[static_cast<size_t>(j)] = j < m / 2 ? j : j - m;
    x[static_cast<size_t>(j)] = kTwoPi * j / m;
  }
  kd = k;
  kd[static_cast<size_t>(m / 2)] = 0.0;
}

ProblemSpec build_rswe(const RsweParams& prm, const SpectralGrid& grid) {
  if (!(prm.epsilon > 0.0) || !(prm.F > 0.0) || prm.mu < 0.0)
    throw std::invalid_argument(
        "build_rswe: epsilon and F must be positive, mu nonnegative");
  const int m = grid.modes;
  const double fi = 1.0 / std::sqrt(prm.F);

  ProblemSpec p;
  p.name = "rswe";
  p.dim = 3 * m;
  p.epsilon = prm.epsilon;

  std::vector<std::pair<std::vector<int>, Mat>> blocks;
  blocks.reserve(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double kk = grid.k[static_cast<size_t>(j)];
    Mat b(3, 3);
    b << Complex(0.0), Complex(-1.0), kI * kk * fi, //
        Complex(1.0), Complex(0.0), Complex(0.0),   //
        kI * kk * fi, Complex(0.0), Complex(0.0);
    blocks.push_back({{j, m + j, 2 * m + j}, b});
  }
  p.L = LinearOperator::block_diagonal(3 * m, blocks);

  if (prm.mu > 0.0) {
    p.diffusion.resize(3 * m);
    for (int j = 0; j < m; ++j) {
      const double kk = grid.k[static_cast<size_t>(j)];
      const double visc = -prm.mu * kk * kk * kk * kk;
      p.diffusion(j) = p.diffusion(m + j) = p.diffusion(2 * m + j) = visc;
    }
  }

  auto shared_grid = std::make_shared<const SpectralGrid>(grid);
  const bool dealias = prm.dealias;
  p.nonlinearity_factory = [shared_grid, dealias]() {
    auto nl = std::make_shared<RsweNonlinearity>(shared_grid, dealias);
    return [nl](const Vec& u, Vec& out) { (*nl)(u, out); };
  };
  p.nonlinearity = p.nonlinearity_factory();

  p.content_hash = hash_doubles(
      {prm.epsilon, prm.F, prm.mu, static_cast<double>(m),
       prm.dealias ? 1.0 : 0.0},
      hash_string(p.name, 1469598103934665603ull));
  return p;
}

Vec rswe_initial_condition(const SpectralGrid& grid) {
  const int m = grid.modes;
  const int ov = 16 * m;
  double mean = 0.0;
  std::vector<double> b(static_cast<size_t>(ov));
  for (int j = 0; j < ov; ++j) {
    b[static_cast<size_t>(j)] = bump_profile(kTwoPi * j / ov);
    mean += b[static_cast<size_t>(j)];
  }
  mean /= ov;
  double amp = 0.0;
  for (double v : b) amp = std::max(amp, std::abs(v - mean));
  const double c1 = 1.0 / amp;

  Eigen::VectorXd h(m);
  for (int j = 0; j < m; ++j)
    h(j) = c1 * (bump_profile(grid.x[static_cast<size_t>(j)]) - mean);

  Vec state = Vec::Zero(3 * m);
  state.segment(2 * m, m) = to_spectral(grid, h);
  return state;
}

void spectral_derivative(const SpectralGrid& grid, const Vec& field_hat,
                         Vec& out) {
  const int m = grid.modes;
  if (field_hat.size() != m)
    throw std::invalid_argument("spectral_derivative: wrong field size");
  out.resize(m);
  for (int j = 0; j < m; ++j)
    out(j) = kI * grid.kd[static_cast<size_t>(j)] * field_hat(j);
}

Vec to_physical(const SpectralGrid& grid, const Vec& field_hat) {
  const int m = grid.modes;
  if (field_hat.size() != m)
    throw std::invalid_argument("to_physical: wrong field size");
  Vec out(m);
  run_fft(m, field_hat.data(), out.data(), FFTW_BACKWARD);
  out /= static_cast<double>(m);
  return out;
}

Vec to_spectral(const SpectralGrid& grid, const Eigen::VectorXd& field) {
  const int m = grid.modes;
  if (field.size() != m)
    throw std::invalid_argument("to_spectral: wrong field size");
  Vec in(m);
  for (int j = 0; j < m; ++j) in(j) = field(j);
  Vec out(m);
  run_fft(m, in.data(), out.data(), FFTW_FORWARD);
  return out;
}

Eigen::VectorXd oversampled_physical(const SpectralGrid& grid,
                                     const Vec& field_hat, int factor) {
  const int m = grid.modes;
  if (field_hat.size() != m)
    throw std::invalid_argument("oversampled_physical: wrong field size");
  if (factor < 1)
    throw std::invalid_argument("oversampled_physical: factor must be >= 1");
  const int big = m * factor;
  Vec padded = Vec::Zero(big);
  for (int j = 0; j < m / 2; ++j) padded(j) = field_hat(j);
  for (int j = m / 2; j < m; ++j) padded(big - m + j) = field_hat(j);
  Vec phys(big);
  run_fft(big, padded.data(), phys.data(), FFTW_BACKWARD);
  Eigen::VectorXd out(big);
  for (int j = 0; j < big; ++j) out(j) = phys(j).real() / m;
  return out;
}

double rswe_relative_linf(const ProblemSpec& p, const SpectralGrid& grid,
                          const Vec& w, const Vec& w_ref, double t) {
  const int m = grid.modes;
  if (w.size() != 3 * m || w_ref.size() != 3 * m)
    throw std::invalid_argument("rswe_relative_linf: wrong state size");
  Vec ua(3 * m), ub(3 * m);
  apply_linear_flow(p.L, p.epsilon, t, w, ua, Direction::Forward);
  apply_linear_flow(p.L, p.epsilon, t, w_ref, ub, Direction::Forward);
  double num = 0.0, den = 0.0;
  for (int f = 0; f < 3; ++f) {
    const Vec fa = to_physical(grid, ua.segment(f * m, m));
    const Vec fb = to_physical(grid, ub.segment(f * m, m));
    for (int j = 0; j < m; ++j) {
      const double d = std::abs(fa(j).real() - fb(j).real());
      // max() would silently drop NaN from a diverged state
      if (std::isnan(d)) return d;
      num = std::max(num, d);
      den = std::max(den, std::abs(fb(j).real()));
    }
  }
  if (den == 0.0)
    throw std::invalid_argument("rswe_relative_linf: zero reference");
  return num / den;
}

} // namespace mlp
