#pragma once

#include <cstddef>

#include "slmulti/coeffs.hpp"
#include "slmulti/shinzettl.hpp"
#include "slmulti/types.hpp"

namespace slmulti {

struct PropagationOptions {
  /// Absolute per-entry tolerance on the accumulated propagator.
  double tol = 1e-10;
  /// Smallest admissible step, relative to the interval length.
  double min_step = 1e-12;
  std::size_t max_steps = 5'000'000;
};

/// Maps (y, D1 y)(a_{i-1}+) to (y, D1 y)(a_i-).
struct TransferMatrix {
  std::size_t interval = 0;
  cplx lambda{};
  Mat2 T;
  double err_est = 0.0;
};

TransferMatrix transfer_matrix(const IntervalCoefficients& c, cplx lambda,
                               const PropagationOptions& opts = {}, std::size_t interval = 0);

/// exp(A dt) in closed form. Exact up to rounding; used as the oracle for
/// piecewise-constant coefficients.
Mat2 constant_piece_propagator(const Mat2& A, double dt);

/// Solution of l y = lambda y + h with initial trace `start`, sampled on `grid`.
Trajectory propagate_solution(const IntervalCoefficients& c, cplx lambda, const Forcing& h,
                              const Vec2& start, const SampleGrid& grid,
                              const PropagationOptions& opts = {}, std::size_t interval = 0);

struct ParticularSolution {
  Trajectory trajectory;  // zero initial trace
  Vec2 end_trace;
};

ParticularSolution propagate_inhomogeneous(const IntervalCoefficients& c, cplx lambda,
                                           const Forcing& h, const SampleGrid& grid,
                                           const PropagationOptions& opts = {},
                                           std::size_t interval = 0);

}  // namespace slmulti
