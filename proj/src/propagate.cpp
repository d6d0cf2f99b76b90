#include "slmulti/propagate.hpp"

#include <cmath>
#include <stdexcept>

#include "magnus.hpp"

namespace slmulti {

TransferMatrix transfer_matrix(const IntervalCoefficients& c, cplx lambda,
                               const PropagationOptions& opts, std::size_t interval) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("transfer_matrix: tol must be positive");
  const Forcing none;
  detail::MagnusIntegrator integrator(c, lambda, none, opts);
  detail::Mat3 P = detail::Mat3::Identity();
  integrator.advance(c.left(), c.right(), P);
  return {interval, lambda, P.topLeftCorner<2, 2>(), integrator.error_estimate()};
}

Mat2 constant_piece_propagator(const Mat2& A, double dt) {
  if (dt < 0.0) throw std::invalid_argument("constant_piece_propagator: negative dt");
  // exp(A dt) = exp(tr/2 dt) * exp(B dt), B trace-free with B^2 = s2 I.
  const cplx half_trace = 0.5 * A.trace();
  const Mat2 B = (A - half_trace * Mat2::Identity()) * dt;
  const cplx s2 = B(0, 0) * B(0, 0) + B(0, 1) * B(1, 0);
  cplx ch, sh;
  if (std::abs(s2) < 1.0) {
    ch = 1.0;
    sh = 1.0;
    cplx term = 1.0;
    for (int j = 1; j < 14; ++j) {
      term *= s2 / static_cast<double>((2 * j - 1) * (2 * j));
      ch += term;
      sh += term / static_cast<double>(2 * j + 1);
    }
  } else {
    const cplx s = std::sqrt(s2);
    ch = std::cosh(s);
    sh = std::sinh(s) / s;
  }
  return std::exp(half_trace * dt) * (ch * Mat2::Identity() + sh * B);
}

Trajectory propagate_solution(const IntervalCoefficients& c, cplx lambda, const Forcing& h,
                              const Vec2& start, const SampleGrid& grid,
                              const PropagationOptions& opts, std::size_t interval) {
  if (grid.size() < 2 || grid.left() != c.left() || grid.right() != c.right()) {
    throw std::invalid_argument("propagate_solution: grid does not span the interval");
  }
  detail::MagnusIntegrator integrator(c, lambda, h, opts);
  Trajectory traj;
  traj.interval = interval;
  traj.lambda = lambda;
  traj.grid = grid;
  traj.u.reserve(grid.size());
  traj.v.reserve(grid.size());
  traj.image.reserve(grid.size());
  const Eigen::Vector3cd z0(start(0), start(1), 1.0);
  detail::Mat3 P = detail::Mat3::Identity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) integrator.advance(grid.t[k - 1], grid.t[k], P);
    const Eigen::Vector3cd z = P * z0;
    traj.u.push_back(z(0));
    traj.v.push_back(z(1));
    traj.image.push_back(lambda * z(0) + h(grid.t[k]));
  }
  return traj;
}

ParticularSolution propagate_inhomogeneous(const IntervalCoefficients& c, cplx lambda,
                                           const Forcing& h, const SampleGrid& grid,
                                           const PropagationOptions& opts, std::size_t interval) {
  ParticularSolution out{propagate_solution(c, lambda, h, Vec2::Zero(), grid, opts, interval), {}};
  out.end_trace = Vec2(out.trajectory.u.back(), out.trajectory.v.back());
  return out;
}

}  // namespace slmulti
