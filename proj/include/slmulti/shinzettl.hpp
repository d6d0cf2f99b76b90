#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "slmulti/coeffs.hpp"
#include "slmulti/types.hpp"

namespace slmulti {

/// Right-hand side h of l y = lambda y + h on one interval.
class Forcing {
 public:
  using Fn = std::function<cplx(double)>;

  /// h = 0.
  Forcing() = default;
  Forcing(Fn fn, std::vector<double> breakpoints);

  static Forcing zero() { return {}; }
  static Forcing from_poly(const PiecewisePoly& f);
  /// Local cubic Lagrange interpolation of samples on a strictly increasing grid
  /// (at least four points).
  static Forcing from_samples(std::vector<double> t, std::vector<cplx> values);

  cplx operator()(double t) const { return fn_ ? fn_(t) : cplx{}; }
  bool is_zero() const { return !fn_; }
  /// Points where h may be non-smooth; the integrator restarts there.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  Fn fn_;
  std::vector<double> breakpoints_;
};

struct GridOptions {
  double max_panel = 0.25;
  /// Largest |lambda| the grid must resolve; shrinks panels as 1/sqrt.
  double lambda_scale = 0.0;
  std::vector<double> extra_breaks;
};

/// Composite 10-point Gauss-Legendre grid. Panels never straddle a coefficient
/// knot. Each panel contributes its left endpoint (weight 0) and its Gauss
/// nodes; the final right endpoint closes the grid.
struct SampleGrid {
  std::vector<double> t;
  std::vector<double> weights;
  /// Indices into t of the panel endpoints, first = 0, last = t.size() - 1.
  std::vector<std::size_t> panel_bounds;

  static constexpr std::size_t kGaussOrder = 10;

  static SampleGrid gauss(const IntervalCoefficients& c, const GridOptions& opts = {});
  static SampleGrid gauss(double a, double b, std::vector<double> breaks, const GridOptions& opts);

  std::size_t size() const { return t.size(); }
  double left() const { return t.front(); }
  double right() const { return t.back(); }
  std::size_t panels() const { return panel_bounds.size() - 1; }
  /// Barycentric interpolation of grid values at t within the owning panel.
  cplx interpolate(const std::vector<cplx>& values, double t) const;
};

/// Sampled element of the maximal domain on one interval: u = y, v = D1 y,
/// image = l[y] at the grid points.
struct Trajectory {
  std::size_t interval = 0;
  SampleGrid grid;
  cplx lambda{};
  std::vector<cplx> u;
  std::vector<cplx> v;
  std::vector<cplx> image;

  using Fn = std::function<cplx(double)>;
  static Trajectory from_functions(std::size_t interval, SampleGrid grid, cplx lambda, const Fn& u,
                                   const Fn& v, const Fn& image);

  /// a*x + b*y on a shared grid; images combine linearly.
  static Trajectory combine(cplx a, const Trajectory& x, cplx b, const Trajectory& y);

  Forcing as_forcing() const;
};

struct EndpointTraces {
  Vec2 start;  // (y, D1 y) at a_{i-1}+
  Vec2 end;    // (y, D1 y) at a_i-
};

/// A(t; lambda) of the first-order system (u, v)' = A (u, v) + (0, -h).
Mat2 system_matrix(const IntervalCoefficients& c, cplx lambda, double t);

EndpointTraces quasi_derivative_traces(const Trajectory& traj);

/// Max-norm of the cumulative defect of (u, v)' = A (u, v) - (0, image),
/// integrated panel by panel and normalized by the trajectory magnitude.
/// Uses the trajectory's stored image of l.
double integral_defect(const Trajectory& traj, const IntervalCoefficients& c);

/// Defect of traj against l y = lambda y + h.
double l_residual(const Trajectory& traj, const IntervalCoefficients& c, cplx lambda,
                  const Forcing& h);

}  // namespace slmulti
