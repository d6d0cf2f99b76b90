#pragma once

// Sixth-order Magnus integrator for the augmented linear system
//   z' = G(t) z,  G = [[A(t), (0, -h(t))^T], [0, 0]],  z = (u, v, 1).
// Each step is the exact exponential of a trace-free 2x2 block, so the
// homogeneous part of every step has determinant one up to rounding.

#include <Eigen/Dense>

#include "slmulti/propagate.hpp"
#include "slmulti/shinzettl.hpp"

namespace slmulti::detail {

using Mat3 = Eigen::Matrix3cd;

class MagnusIntegrator {
 public:
  MagnusIntegrator(const IntervalCoefficients& c, cplx lambda, const Forcing& h,
                   const PropagationOptions& opts);

  /// P <- (propagator over [t0, t1]) * P. Restarts at coefficient and
  /// forcing breakpoints inside the span.
  void advance(double t0, double t1, Mat3& P);

  double error_estimate() const { return err_est_; }
  std::size_t steps() const { return steps_; }

 private:
  Mat3 generator(double t) const;
  Mat3 step(double t, double h) const;
  void advance_smooth(double t0, double t1, Mat3& P);

  const IntervalCoefficients& c_;
  cplx lambda_;
  const Forcing& h_;
  PropagationOptions opts_;
  std::vector<double> breaks_;
  double max_step_;
  double step_guess_;
  double err_est_ = 0.0;
  std::size_t steps_ = 0;
};

/// exp of [[B, b], [0, 0]] for trace-free 2x2 B.
Mat3 expm_augmented(const Mat3& omega);

}  // namespace slmulti::detail
