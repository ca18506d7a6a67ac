#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "mlp/averaging.hpp"
#include "mlp/problems.hpp"

using namespace mlp;
using namespace std::complex_literals;

TEST_CASE("bump kernel is symmetric, positive inside, zero outside") {
  CHECK(kernel_value(0.51) == 0.0);
  CHECK(kernel_value(-0.51) == 0.0);
  CHECK(kernel_value(0.5) == 0.0);
  CHECK(kernel_value(-0.5) == 0.0);
  for (double s : {0.0, 0.1, 0.25, 0.49}) {
    CHECK(kernel_value(s) > 0.0);
    CHECK(kernel_value(s) == kernel_value(-s));
  }
  CHECK(kernel_value(0.0) > kernel_value(0.4)); // peaked at the origin
}

TEST_CASE("kernel normalization constant is reproduced to high accuracy") {
  // frozen 64-node Gauss-Legendre value of integral exp(1/(s^2 - 1/4)) ds
  CHECK(kernel_normalization() ==
        doctest::Approx(7.0298584066096556e-03).epsilon(1e-13));
}

TEST_CASE("Gauss-Legendre rules have the classical properties") {
  for (int n : {2, 8, 33, 64}) {
    const auto& q = gauss_legendre(n);
    REQUIRE(static_cast<int>(q.x.size()) == n);
    REQUIRE(static_cast<int>(q.w.size()) == n);
    double wsum = 0.0;
    for (int m = 0; m < n; ++m) {
      CHECK(q.x[m] > -1.0);
      CHECK(q.x[m] < 1.0);
      if (m) CHECK(q.x[m] > q.x[m - 1]);
      CHECK(q.w[m] > 0.0);
      wsum += q.w[m];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // symmetry of nodes and weights
    CHECK(q.x[0] == doctest::Approx(-q.x[n - 1]).epsilon(1e-14));
    CHECK(q.w[0] == doctest::Approx(q.w[n - 1]).epsilon(1e-13));
  }

  // an n-node rule integrates polynomials up to degree 2n-1 exactly
  const auto& q = gauss_legendre(8);
  double ix4 = 0.0, ix15 = 0.0;
  for (int m = 0; m < 8; ++m) {
    ix4 += q.w[m] * std::pow(q.x[m], 4);
    ix15 += q.w[m] * std::pow(q.x[m], 15);
  }
  CHECK(ix4 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(std::abs(ix15) < 1e-15); // odd power

  // one-node rule degenerates to the midpoint rule
  const auto& q1 = gauss_legendre(1);
  REQUIRE(q1.x.size() == 1);
  CHECK(q1.x[0] == 0.0);
  CHECK(q1.w[0] == doctest::Approx(2.0).epsilon(1e-14));
  // window weights insist on at least two nodes
  CHECK_THROWS_AS(averaging_weights(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(averaging_weights(-0.5, 64), std::invalid_argument);
  // cached: same object returned
  CHECK(&gauss_legendre(16) == &gauss_legendre(16));
}

TEST_CASE("averaging weights integrate the kernel to one") {
  for (double eta : {1.0, 0.37, 2.0, 1e-3}) {
    for (int nodes : {64, 150, 2048}) {
      auto w = averaging_weights(eta, nodes);
      REQUIRE(w.s.size() == w.c.size());
      double csum = 0.0, first_moment = 0.0;
      for (size_t m = 0; m < w.s.size(); ++m) {
        CHECK(std::abs(w.s[m]) < eta / 2);
        CHECK(w.c[m] >= 0.0);
        csum += w.c[m];
        first_moment += w.c[m] * w.s[m];
      }
      CHECK(std::abs(csum - 1.0) < 1e-10);
      CHECK(std::abs(first_moment) < 1e-12 * eta); // even kernel
    }
  }
}

TEST_CASE("node-count rule resolves the fastest phase within the window") {
  CHECK(nodes_for_window(200.0, 1.0, 1.0, 32) == 150);
  CHECK(nodes_for_window(200.0, 0.1, 1.0, 32) == 60);
  CHECK(nodes_for_window(2.0 * std::numbers::pi, 2.0, 1.0, 32) == 57);
  // base count wins when it exceeds the phase requirement
  CHECK(nodes_for_window(1.0, 0.01, 1.0, 64) == 64);
  // slower epsilon scaling raises the requirement
  CHECK(nodes_for_window(200.0, 1.0, 0.5, 32) ==
        nodes_for_window(400.0, 1.0, 1.0, 32));
}

TEST_CASE("damping multiplier is bounded, exact at zero, ordered in r") {
  const int nodes = 2048;
  const double eta = 2.0;

  CHECK(std::abs(damping_factor(0.0, eta, nodes) - 1.0) < 1e-10);

  for (double r : {0.5, 1.0, 5.0, 10.0, 100.0, 1000.0}) {
    double mag = std::abs(damping_factor(r, eta, nodes));
    CHECK(mag <= 1.0 + 1e-10);
  }

  // faster oscillations are damped more strongly once r*eta >> 1
  double d10 = std::abs(damping_factor(10.0, eta, nodes));
  double d100 = std::abs(damping_factor(100.0, eta, nodes));
  double d1000 = std::abs(damping_factor(1000.0, eta, nodes));
  CHECK(d100 < d10);
  CHECK(d1000 < d100);
  CHECK(d10 < 1.0);

  // shrinking the window toward zero recovers the unaveraged dynamics
  CHECK(std::abs(damping_factor(100.0, 1e-8, 64) - 1.0) < 1e-4);
}

TEST_CASE("averaged right-hand side recovers the plain one as eta -> 0") {
  ProblemParams pp;
  pp.r = 100.0;
  auto p = make_problem(ProblemId::Oscillatory, pp);
  Vec w = default_initial(ProblemId::Oscillatory, pp);

  AveragedRhs avg(p, 1e-8, 64);
  RhsWorkspace wsa, wsp;
  Vec oa, op;
  avg.eval(0.37, w, oa, wsa);
  modulation_rhs(p, 0.37, w, op, wsp);
  CHECK(std::abs(oa[0] - op[0]) < 1e-4 * std::abs(op[0]));
}

TEST_CASE("averaging damps the oscillatory term at finite windows") {
  ProblemParams pp;
  pp.r = 100.0;
  auto p = make_problem(ProblemId::Oscillatory, pp);
  Vec w = default_initial(ProblemId::Oscillatory, pp);

  // modulation RHS is -e^{irt} w^2; its window average multiplies the
  // magnitude by |damping_factor(r, eta)|
  double eta = 2.0;
  int nodes = nodes_for_window(pp.r, eta, 1.0, 32);
  AveragedRhs avg(p, eta, nodes);
  RhsWorkspace ws;
  Vec out;
  avg.eval(0.0, w, out, ws);
  Complex expect =
      -damping_factor(pp.r, eta, nodes) * w[0] * w[0]; // t = 0 phase is 1
  CHECK(std::abs(out[0] - expect) < 1e-13 * std::abs(w[0] * w[0]));
  CHECK(std::abs(out[0]) < std::abs(w[0] * w[0])); // strictly damped
}

TEST_CASE("zero linear operator short-circuits the quadrature exactly") {
  auto p = make_problem(ProblemId::Decay, {});
  REQUIRE(p.L.is_zero());
  Vec w = default_initial(ProblemId::Decay, {});

  AveragedRhs avg(p, 0.5, 32);
  RhsWorkspace wsa, wsp;
  Vec oa, op;
  avg.eval(1.3, w, oa, wsa);
  modulation_rhs(p, 1.3, w, op, wsp);
  CHECK(oa[0] == op[0]); // bitwise: the averaged path reduces to the plain one
  CHECK(wsa.evals == 1); // and costs a single evaluation, not 32
}

TEST_CASE("diffusion symbol passes through the average unchanged") {
  // block-operator problem with diffusion: averaged-with-diffusion minus
  // averaged-without must equal d .* w exactly up to roundoff
  ProblemParams pp;
  auto p = make_problem(ProblemId::Spring, pp);
  REQUIRE(p.dim == 6);
  p.diffusion = Eigen::VectorXd::LinSpaced(6, -0.5, -0.1);

  Vec w(6);
  w << 0.2 + 0.1i, -0.3, 0.4i, 0.5 - 0.2i, -0.1 + 0.6i, 0.3;
  AveragedRhs with(p, 1.0, 48, true), without(p, 1.0, 48, false);
  RhsWorkspace w1, w2;
  Vec o1, o2;
  with.eval(0.7, w, o1, w1);
  without.eval(0.7, w, o2, w2);
  Vec diff = o1 - o2;
  for (int j = 0; j < 6; ++j)
    CHECK(std::abs(diff[j] - p.diffusion[j] * w[j]) < 1e-14);
}

TEST_CASE("averaged evaluation reports the requested node count") {
  ProblemParams pp;
  auto p = make_problem(ProblemId::ThreeScale, pp);
  AveragedRhs avg(p, 1.0, 150);
  CHECK(avg.nodes() == 150);
  CHECK(avg.eta() == 1.0);

  RhsWorkspace ws;
  Vec out, w = default_initial(ProblemId::ThreeScale, pp);
  avg.eval(0.0, w, out, ws);
  CHECK(ws.evals == 150);
}
