#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slmulti/propagate.hpp"
#include "slmulti/shinzettl.hpp"
#include "support.hpp"

using namespace slmulti;
using std::numbers::pi;

namespace {

IntervalCoefficients free_coeffs(double a, double b) {
  return {PiecewisePoly::constant(a, b, 1.0), PiecewisePoly::constant(a, b, 0.0)};
}

}  // namespace

TEST_CASE("system matrix examples") {
  const auto c = free_coeffs(0.0, 1.0);
  Mat2 expect;
  expect << 0.0, 1.0, -1.0, 0.0;
  CHECK(testing::max_abs(system_matrix(c, 1.0, 0.3) - expect) == 0.0);
  expect << 0.0, 1.0, 0.0, 0.0;
  CHECK(testing::max_abs(system_matrix(c, 0.0, 0.7) - expect) == 0.0);

  const double q = 0.75;
  const cplx lambda(2.0, -1.0);
  const IntervalCoefficients cq{PiecewisePoly::constant(0.0, 1.0, 1.0), PiecewisePoly::constant(0.0, 1.0, q)};
  const Mat2 A = system_matrix(cq, lambda, 0.5);
  expect << q, 1.0, -lambda - q * q, -q;
  CHECK(testing::max_abs(A - expect) == 0.0);
  CHECK(A.trace() == cplx(0.0));
}

TEST_CASE("system matrix rejects points outside the interval") {
  CHECK_THROWS(system_matrix(free_coeffs(0.0, 1.0), 1.0, 1.5));
}

TEST_CASE("property: trace of A is exactly zero") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  testing::SpecShape shape;
  shape.max_degree = 6;
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = testing::random_spec(rng, shape);
    const auto& c = spec.coeffs[0];
    const cplx lambda = testing::random_complex(rng, 30.0);
    const Mat2 A = system_matrix(c, lambda, c.left() + unit(rng) * c.length());
    CHECK(A(0, 0) + A(1, 1) == cplx(0.0));
  }
}

TEST_CASE("endpoint traces") {
  SUBCASE("sin on [0, pi]") {
    const auto c = free_coeffs(0.0, pi);
    const auto traj = Trajectory::from_functions(
        0, SampleGrid::gauss(c), 1.0, [](double t) { return cplx(std::sin(t)); },
        [](double t) { return cplx(std::cos(t)); }, [](double t) { return cplx(std::sin(t)); });
    const auto tr = quasi_derivative_traces(traj);
    CHECK(std::abs(tr.start(0)) < 1e-15);
    CHECK(std::abs(tr.start(1) - 1.0) < 1e-15);
    CHECK(std::abs(tr.end(0)) < 1e-15);
    CHECK(std::abs(tr.end(1) + 1.0) < 1e-15);
  }
  SUBCASE("constant") {
    const auto c = free_coeffs(0.0, 2.0);
    const auto traj = Trajectory::from_functions(
        0, SampleGrid::gauss(c), 0.0, [](double) { return cplx(1.0); }, [](double) { return cplx(0.0); },
        [](double) { return cplx(0.0); });
    const auto tr = quasi_derivative_traces(traj);
    CHECK(tr.start == Vec2(1.0, 0.0));
    CHECK(tr.end == Vec2(1.0, 0.0));
  }
  SUBCASE("exponential with Q = 1 has vanishing quasi-derivative") {
    const double L = 1.3;
    const IntervalCoefficients c{PiecewisePoly::constant(0.0, L, 1.0), PiecewisePoly::constant(0.0, L, 1.0)};
    // v = y' - Q y = 0; l[y] = -(v)' ... with q = Q' = 0 and p = 1, -y'' = -e^t.
    const auto traj = Trajectory::from_functions(
        0, SampleGrid::gauss(c), -1.0, [](double t) { return cplx(std::exp(t)); },
        [](double) { return cplx(0.0); }, [](double t) { return cplx(-std::exp(t)); });
    const auto tr = quasi_derivative_traces(traj);
    CHECK(tr.start == Vec2(1.0, 0.0));
    CHECK(std::abs(tr.end(0) - std::exp(L)) < 1e-14);
    CHECK(tr.end(1) == cplx(0.0));
    // The system reproduces it: u' = Q r u + r v = u, v' = -(lambda + Q^2 r) u - Q r v = 0.
    CHECK(l_residual(traj, c, -1.0, Forcing::zero()) < 1e-12);
  }
}

TEST_CASE("l_residual examples") {
  const auto c = free_coeffs(0.0, pi);
  const auto grid = SampleGrid::gauss(c);
  SUBCASE("sin t solves -y'' = y") {
    const auto traj = Trajectory::from_functions(
        0, grid, 1.0, [](double t) { return cplx(std::sin(t)); }, [](double t) { return cplx(std::cos(t)); },
        [](double t) { return cplx(std::sin(t)); });
    CHECK(l_residual(traj, c, 1.0, Forcing::zero()) < 1e-13);
  }
  SUBCASE("t does not") {
    const auto traj = Trajectory::from_functions(
        0, grid, 1.0, [](double t) { return cplx(t); }, [](double) { return cplx(1.0); },
        [](double) { return cplx(0.0); });
    CHECK(l_residual(traj, c, 1.0, Forcing::zero()) > 0.1);
    // Against lambda = 0 it is a solution.
    CHECK(l_residual(traj, c, 0.0, Forcing::zero()) < 1e-13);
  }
  SUBCASE("propagated homogeneous solution") {
    const cplx lambda(3.0, 0.5);
    const auto traj = propagate_solution(c, lambda, Forcing::zero(), Vec2(0.3, cplx(1.0, -0.2)), grid);
    CHECK(l_residual(traj, c, lambda, Forcing::zero()) < 1e-9);
  }
  SUBCASE("forced solution") {
    // u = t^2 with lambda = 0 gives l[u] = -2 = h.
    const Forcing h([](double) { return cplx(-2.0); }, {});
    const auto traj = Trajectory::from_functions(
        0, grid, 0.0, [](double t) { return cplx(t * t); }, [](double t) { return cplx(2 * t); },
        [](double) { return cplx(-2.0); });
    CHECK(l_residual(traj, c, 0.0, h) < 1e-13);
    CHECK(l_residual(traj, c, 0.0, Forcing::zero()) > 0.1);
  }
}

TEST_CASE("regularization identity for smooth Q") {
  // r = 1, Q = sin t, y = cos(2t): v = y' - Q y and
  // -D2 y = -(v' + Q v + Q^2 y)... must equal -y'' + Q' y.
  const double L = 2.0;
  const IntervalCoefficients c{PiecewisePoly::constant(0.0, L, 1.0),
                               PiecewisePoly::polynomial(0.0, L, {0.0, 1.0, 0.0, -1.0 / 6, 0.0, 1.0 / 120})};
  auto Q = [&](double t) { return c.Q(t); };
  auto dQ = [](double t) { return 1.0 - t * t / 2 + t * t * t * t / 24; };
  const auto traj = Trajectory::from_functions(
      0, SampleGrid::gauss(c), 0.0, [](double t) { return cplx(std::cos(2 * t)); },
      [&](double t) { return cplx(-2 * std::sin(2 * t) - Q(t) * std::cos(2 * t)); },
      [&](double t) { return cplx(4 * std::cos(2 * t) + dQ(t) * std::cos(2 * t)); });
  CHECK(integral_defect(traj, c) < 1e-12);
}

TEST_CASE("gauge: shifting Q with a matching shift of v keeps the residual") {
  const double L = 1.0, shift = 5.0;
  const IntervalCoefficients c{PiecewisePoly::constant(0.0, L, 1.0), PiecewisePoly::polynomial(0.0, L, {0.0, 1.0})};
  IntervalCoefficients cs = c;
  cs.Q = c.Q.shifted(shift);
  // y = sin 3t, q = 1: l[y] = 9 y + y.
  auto y = [](double t) { return std::sin(3 * t); };
  auto dy = [](double t) { return 3 * std::cos(3 * t); };
  const auto grid = SampleGrid::gauss(c);
  const auto a = Trajectory::from_functions(
      0, grid, 0.0, [&](double t) { return cplx(y(t)); }, [&](double t) { return cplx(dy(t) - c.Q(t) * y(t)); },
      [&](double t) { return cplx(10 * y(t)); });
  const auto b = Trajectory::from_functions(
      0, grid, 0.0, [&](double t) { return cplx(y(t)); }, [&](double t) { return cplx(dy(t) - cs.Q(t) * y(t)); },
      [&](double t) { return cplx(10 * y(t)); });
  CHECK(integral_defect(a, c) < 1e-12);
  CHECK(integral_defect(b, cs) < 1e-12);
}

TEST_CASE("delta potential: u and v continuous, classical derivative jumps") {
  const double alpha = 1.5;
  const IntervalCoefficients c{PiecewisePoly::constant(0.0, 1.0, 1.0), PiecewisePoly::step(0.0, 1.0, 0.5, 0.0, alpha)};
  const auto grid = SampleGrid::gauss(c);
  const auto traj = propagate_solution(c, 7.0, Forcing::zero(), Vec2(0.0, 1.0), grid);
  // 0.5 is a panel boundary.
  std::size_t k = 0;
  while (grid.t[k] < 0.5) ++k;
  REQUIRE(grid.t[k] == 0.5);
  const cplx uL = traj.u[k - 1], uR = traj.u[k + 1], vL = traj.v[k - 1], vR = traj.v[k + 1];
  const double gap = grid.t[k + 1] - grid.t[k - 1];
  CHECK(std::abs(uR - uL) < 10 * gap);
  CHECK(std::abs(vR - vL) < 10 * gap);
  // y' = r (v + Q u) jumps by alpha u(0.5).
  const cplx jump = (vR + alpha * uR) - vL;
  CHECK(std::abs(jump - alpha * traj.u[k]) < 100 * gap);
}

TEST_CASE("sample grid") {
  IntervalCoefficients c{PiecewisePoly::constant(0.0, 1.0, 1.0), PiecewisePoly::step(0.0, 1.0, 0.3, 0.0, 1.0)};
  const auto grid = SampleGrid::gauss(c, {.max_panel = 0.2, .lambda_scale = 0.0, .extra_breaks = {}});
  SUBCASE("panels never straddle knots") {
    bool found = false;
    for (auto b : grid.panel_bounds) found = found || grid.t[b] == 0.3;
    CHECK(found);
    for (std::size_t p = 0; p < grid.panels(); ++p) {
      CHECK(grid.t[grid.panel_bounds[p + 1]] - grid.t[grid.panel_bounds[p]] <= 0.2 + 1e-15);
    }
  }
  SUBCASE("weights integrate polynomials exactly") {
    double s = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) s += grid.weights[k] * std::pow(grid.t[k], 7);
    CHECK(s == doctest::Approx(1.0 / 8).epsilon(1e-14));
  }
  SUBCASE("interpolation") {
    std::vector<cplx> vals;
    for (double t : grid.t) vals.emplace_back(std::exp(t), std::sin(t));
    for (double t : {0.0, 0.123, 0.3, 0.61, 1.0}) {
      CHECK(std::abs(grid.interpolate(vals, t) - cplx(std::exp(t), std::sin(t))) < 1e-12);
    }
  }
  SUBCASE("lambda scale shrinks panels") {
    const auto fine = SampleGrid::gauss(c, {.max_panel = 0.2, .lambda_scale = 400.0, .extra_breaks = {}});
    CHECK(fine.panels() > grid.panels());
  }
}

TEST_CASE("forcing from samples") {
  std::vector<double> t;
  std::vector<cplx> v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k / 100.0);
    v.emplace_back(std::cos(t.back()), t.back());
  }
  const auto h = Forcing::from_samples(t, v);
  CHECK(std::abs(h(0.4321) - cplx(std::cos(0.4321), 0.4321)) < 1e-9);
  CHECK_THROWS(h(1.5));
  CHECK_THROWS(Forcing::from_samples({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}));
}
