#include "doctest.h"

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "mlp/averaging.hpp"
#include "mlp/integrators.hpp"
#include "mlp/problems.hpp"

using namespace mlp;
using namespace std::complex_literals;

namespace {

// u' = a*u - u^2 has the closed form u(t) = a u0 e^{at} / (a + u0(e^{at}-1));
// with a = -1: u(t) = u0 e^{-t} / (1 - u0(e^{-t}-1)).
Complex logistic_exact(Complex u0, double t) {
  double ea = std::exp(-t);
  return u0 * ea / (1.0 - u0 * (ea - 1.0));
}

// linear-plus-quadratic scalar problem with the linear part carried as a
// diffusion symbol, so RK2 treats it inside the RHS and Strang splits it off
ProblemSpec logistic_problem() {
  ProblemSpec p;
  p.name = "logistic";
  p.dim = 1;
  p.epsilon = 1.0;
  p.L = LinearOperator::zero(1);
  p.nonlinearity = [](const Vec& u, Vec& out) { out = -u.cwiseProduct(u); };
  p.diffusion = Eigen::VectorXd::Constant(1, -1.0);
  p.content_hash = hash_string("logistic", 1);
  return p;
}

double final_error(const ProblemSpec& p, Integrator method, double dt,
                   double t_end, Complex u0, Complex exact) {
  LevelSpec spec{0, dt, 0.0, 1, method};
  OneStep stepper(p, spec, nullptr);
  int n = static_cast<int>(std::llround(t_end / dt));
  REQUIRE(near_integer(t_end / dt));
  Vec y(1), out;
  y << u0;
  integrate_n(stepper, 0.0, n, y, out);
  return std::abs(out[0] - exact);
}

// observed order from successively halved steps; requires the asymptotic
// regime, so keep dt small but well above roundoff
double observed_order(const ProblemSpec& p, Integrator method, double dt0,
                      double t_end, Complex u0, Complex exact) {
  double e0 = final_error(p, method, dt0, t_end, u0, exact);
  double e1 = final_error(p, method, dt0 / 2, t_end, u0, exact);
  double e2 = final_error(p, method, dt0 / 4, t_end, u0, exact);
  double s01 = std::log2(e0 / e1), s12 = std::log2(e1 / e2);
  CHECK(std::abs(s01 - s12) < 0.2); // both refinements agree on the slope
  return 0.5 * (s01 + s12);
}

} // namespace

TEST_CASE("explicit midpoint reproduces the quadratic Taylor step exactly") {
  Vec y(1), out, k, ymid;
  y << 1.0;
  RhsWorkspace ws;
  auto f = [](double, const Vec& v, Vec& o, RhsWorkspace&) { o = -v; };
  rk2_step(f, 0.0, 0.25, y, out, ws, k, ymid);
  // 1 - h + h^2/2 with h = 0.25 is exactly representable
  CHECK(out[0] == Complex(0.78125, 0.0));
}

TEST_CASE("scalar step agrees bitwise with the vector step") {
  auto fs = [](double t, Complex y) { return -y + 0.1 * std::sin(t) * y * y; };
  auto fv = [&](double t, const Vec& y, Vec& o, RhsWorkspace&) {
    o.resize(1);
    o[0] = fs(t, y[0]);
  };
  Vec y(1), out, k, ymid;
  y << Complex(0.8, -0.3);
  RhsWorkspace ws;
  double t = 0.37, h = 0.05;
  rk2_step(fv, t, h, y, out, ws, k, ymid);
  CHECK(rk2_step_scalar(fs, t, h, y[0]) == out[0]);
}

TEST_CASE("midpoint rule is second order on smooth closed-form problems") {
  SUBCASE("plain decay") {
    auto p = make_problem(ProblemId::Decay, {});
    Complex u0 = default_initial(ProblemId::Decay, {})[0];
    REQUIRE(u0 == Complex(1.0, 0.0));
    double slope =
        observed_order(p, Integrator::RK2, 0.05, 1.0, u0, decay_exact(1.0));
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("oscillatory modulation equation") {
    ProblemParams pp;
    pp.r = 5.0;
    auto p = make_problem(ProblemId::Oscillatory, pp);
    Complex u0 = default_initial(ProblemId::Oscillatory, pp)[0];
    double slope = observed_order(p, Integrator::RK2, 0.02, 1.0, u0,
                                  exact_oscillatory(pp.r, u0, 1.0));
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("logistic with the linear part inside the right-hand side") {
    auto p = logistic_problem();
    double slope = observed_order(p, Integrator::RK2, 0.05, 1.0, Complex(1.0),
                                  logistic_exact(1.0, 1.0));
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("Strang splitting is second order and converges to the same flow") {
  auto p = logistic_problem();
  Complex exact = logistic_exact(1.0, 1.0);
  double slope =
      observed_order(p, Integrator::Strang, 0.05, 1.0, Complex(1.0), exact);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));

  // both discretizations approach the same solution
  CHECK(final_error(p, Integrator::Strang, 1.0 / 512, 1.0, Complex(1.0),
                    exact) < 1e-5);
  CHECK(final_error(p, Integrator::RK2, 1.0 / 512, 1.0, Complex(1.0), exact) <
        1e-5);
}

TEST_CASE("Strang without diffusion degenerates to the midpoint step") {
  auto p = make_problem(ProblemId::Decay, {}); // no diffusion symbol
  Vec y(1), a, b;
  y << Complex(0.9, 0.2);
  OneStep rk(p, LevelSpec{0, 0.1, 0.0, 1, Integrator::RK2}, nullptr);
  OneStep st(p, LevelSpec{0, 0.1, 0.0, 1, Integrator::Strang}, nullptr);
  rk.step(0.0, y, a);
  st.step(0.0, y, b);
  CHECK(a[0] == b[0]);
}

TEST_CASE("step counters track steps and right-hand-side work") {
  ProblemParams pp;
  pp.r = 100.0;
  auto p = make_problem(ProblemId::Oscillatory, pp);
  Vec y = default_initial(ProblemId::Oscillatory, pp), out;

  SUBCASE("plain right-hand side costs two evaluations per step") {
    OneStep stepper(p, LevelSpec{0, 0.01, 0.0, 1, Integrator::RK2}, nullptr);
    integrate_n(stepper, 0.0, 7, y, out);
    CHECK(stepper.steps_taken() == 7);
    CHECK(stepper.rhs_calls() == 14);
    stepper.reset_counters();
    CHECK(stepper.steps_taken() == 0);
    CHECK(stepper.rhs_calls() == 0);
  }
  SUBCASE("averaged right-hand side costs two quadrature sweeps per step") {
    auto avg = std::make_shared<const AveragedRhs>(p, 0.2, 40);
    OneStep stepper(p, LevelSpec{1, 0.1, 0.2, 1, Integrator::RK2}, avg);
    integrate_n(stepper, 0.0, 3, y, out);
    CHECK(stepper.steps_taken() == 3);
    CHECK(stepper.rhs_calls() == 3 * 2 * 40);
  }
}

TEST_CASE("serial integration matches a manual step loop") {
  ProblemParams pp;
  pp.r = 10.0;
  auto p = make_problem(ProblemId::Oscillatory, pp);
  Vec y = default_initial(ProblemId::Oscillatory, pp);

  OneStep a(p, LevelSpec{0, 0.05, 0.0, 1, Integrator::RK2}, nullptr);
  Vec got;
  integrate_n(a, 0.25, 6, y, got);

  OneStep b(p, LevelSpec{0, 0.05, 0.0, 1, Integrator::RK2}, nullptr);
  Vec cur = y, nxt;
  for (int i = 0; i < 6; ++i) {
    b.step(0.25 + 0.05 * i, cur, nxt);
    cur.swap(nxt);
  }
  CHECK(got[0] == cur[0]);
}
