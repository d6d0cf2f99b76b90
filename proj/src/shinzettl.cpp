#include "slmulti/shinzettl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace slmulti {

namespace {

constexpr std::size_t kOrder = SampleGrid::kGaussOrder;
constexpr std::size_t kPanelPoints = kOrder + 2;

struct ReferencePanel {
  std::array<double, kOrder> nodes{};    // ascending in (0, 1)
  std::array<double, kOrder> weights{};  // sum to 1
  std::array<double, kPanelPoints> points{};
  std::array<double, kPanelPoints> bary{};

  ReferencePanel() {
    using Rule = boost::math::quadrature::gauss<double, kOrder>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    // Boost stores the non-negative half of a symmetric rule.
    const std::size_t half = x.size();
    std::size_t k = 0;
    for (std::size_t j = half; j-- > 0;) {
      if (x[j] == 0.0) continue;
      nodes[k] = 0.5 * (1.0 - x[j]);
      weights[k++] = 0.5 * w[j];
    }
    for (std::size_t j = 0; j < half; ++j) {
      nodes[k] = 0.5 * (1.0 + x[j]);
      weights[k++] = 0.5 * w[j];
    }
    points[0] = 0.0;
    for (std::size_t j = 0; j < kOrder; ++j) points[j + 1] = nodes[j];
    points[kPanelPoints - 1] = 1.0;
    for (std::size_t j = 0; j < kPanelPoints; ++j) {
      double prod = 1.0;
      for (std::size_t l = 0; l < kPanelPoints; ++l) {
        if (l != j) prod *= points[j] - points[l];
      }
      bary[j] = 1.0 / prod;
    }
  }
};

const ReferencePanel& reference() {
  static const ReferencePanel panel;
  return panel;
}

}  // namespace

Forcing::Forcing(Fn fn, std::vector<double> breakpoints)
    : fn_(std::move(fn)), breakpoints_(std::move(breakpoints)) {}

Forcing Forcing::from_poly(const PiecewisePoly& f) {
  return Forcing([f](double t) { return cplx{eval_piecewise(f, t), 0.0}; }, f.knots);
}

Forcing Forcing::from_samples(std::vector<double> t, std::vector<cplx> values) {
  if (t.size() < 4 || t.size() != values.size()) {
    throw std::invalid_argument("Forcing::from_samples: need >= 4 matching samples");
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) {
      throw std::invalid_argument("Forcing::from_samples: grid not strictly increasing");
    }
  }
  auto data = std::make_shared<std::pair<std::vector<double>, std::vector<cplx>>>(std::move(t),
                                                                                 std::move(values));
  auto fn = [data](double x) {
    const auto& ts = data->first;
    const auto& ys = data->second;
    const double slack = 1e-12 * std::max(1.0, std::abs(ts.back() - ts.front()));
    if (x < ts.front() - slack || x > ts.back() + slack) {
      throw std::out_of_range("sampled forcing evaluated outside its grid");
    }
    auto it = std::upper_bound(ts.begin(), ts.end(), x);
    std::ptrdiff_t k = (it - ts.begin()) - 1;
    std::ptrdiff_t s = std::clamp<std::ptrdiff_t>(k - 1, 0, static_cast<std::ptrdiff_t>(ts.size()) - 4);
    cplx acc{};
    for (std::ptrdiff_t j = s; j < s + 4; ++j) {
      double basis = 1.0;
      for (std::ptrdiff_t l = s; l < s + 4; ++l) {
        if (l != j) basis *= (x - ts[l]) / (ts[j] - ts[l]);
      }
      acc += basis * ys[j];
    }
    return acc;
  };
  return Forcing(std::move(fn), {});
}

SampleGrid SampleGrid::gauss(const IntervalCoefficients& c, const GridOptions& opts) {
  return gauss(c.left(), c.right(), c.breakpoints(), opts);
}

SampleGrid SampleGrid::gauss(double a, double b, std::vector<double> breaks,
                             const GridOptions& opts) {
  if (!(b > a)) throw std::invalid_argument("SampleGrid::gauss: empty interval");
  breaks.push_back(a);
  breaks.push_back(b);
  breaks.insert(breaks.end(), opts.extra_breaks.begin(), opts.extra_breaks.end());
  std::erase_if(breaks, [&](double x) { return x < a || x > b; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double panel_len =
      std::min(opts.max_panel, 1.5 / (1.0 + std::sqrt(std::max(0.0, opts.lambda_scale))));
  const auto& ref = reference();
  SampleGrid grid;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double lo = breaks[j], hi = breaks[j + 1];
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / panel_len)));
    for (std::size_t p = 0; p < n; ++p) {
      const double pa = lo + (hi - lo) * static_cast<double>(p) / static_cast<double>(n);
      const double pb = p + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(p + 1) / static_cast<double>(n);
      grid.panel_bounds.push_back(grid.t.size());
      grid.t.push_back(pa);
      grid.weights.push_back(0.0);
      for (std::size_t k = 0; k < kOrder; ++k) {
        grid.t.push_back(pa + (pb - pa) * ref.nodes[k]);
        grid.weights.push_back((pb - pa) * ref.weights[k]);
      }
    }
  }
  grid.panel_bounds.push_back(grid.t.size());
  grid.t.push_back(b);
  grid.weights.push_back(0.0);
  return grid;
}

cplx SampleGrid::interpolate(const std::vector<cplx>& values, double x) const {
  if (values.size() != t.size()) throw std::invalid_argument("interpolate: size mismatch");
  // Panel j spans t[panel_bounds[j]] .. t[panel_bounds[j+1]].
  auto it = std::upper_bound(panel_bounds.begin() + 1, panel_bounds.end() - 1, x,
                             [&](double value, std::size_t idx) { return value < t[idx]; });
  const std::size_t lo = *(it - 1);
  const std::size_t hi = *it;
  const auto& ref = reference();
  const double a = t[lo], h = t[hi] - t[lo];
  const double s = (x - a) / h;
  cplx num{};
  double den = 0.0;
  for (std::size_t j = 0; j < kPanelPoints; ++j) {
    const double d = s - ref.points[j];
    if (d == 0.0) return values[lo + j];
    const double w = ref.bary[j] / d;
    num += w * values[lo + j];
    den += w;
  }
  return num / den;
}

Trajectory Trajectory::from_functions(std::size_t interval, SampleGrid grid, cplx lambda,
                                      const Fn& u, const Fn& v, const Fn& image) {
  Trajectory traj;
  traj.interval = interval;
  traj.lambda = lambda;
  traj.grid = std::move(grid);
  for (double t : traj.grid.t) {
    traj.u.push_back(u(t));
    traj.v.push_back(v(t));
    traj.image.push_back(image(t));
  }
  return traj;
}

Trajectory Trajectory::combine(cplx a, const Trajectory& x, cplx b, const Trajectory& y) {
  if (x.grid.t != y.grid.t) throw std::invalid_argument("Trajectory::combine: grids differ");
  Trajectory out = x;
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    out.u[k] = a * x.u[k] + b * y.u[k];
    out.v[k] = a * x.v[k] + b * y.v[k];
    out.image[k] = a * x.image[k] + b * y.image[k];
  }
  return out;
}

Forcing Trajectory::as_forcing() const {
  auto data = std::make_shared<std::pair<SampleGrid, std::vector<cplx>>>(grid, u);
  std::vector<double> breaks;
  for (std::size_t idx : grid.panel_bounds) breaks.push_back(grid.t[idx]);
  return Forcing([data](double t) { return data->first.interpolate(data->second, t); },
                 std::move(breaks));
}

Mat2 system_matrix(const IntervalCoefficients& c, cplx lambda, double t) {
  const double r = eval_piecewise(c.r, t);
  const double Q = eval_piecewise(c.Q, t);
  Mat2 A;
  A << Q * r, r, -lambda - Q * Q * r, -Q * r;
  return A;
}

EndpointTraces quasi_derivative_traces(const Trajectory& traj) {
  return {Vec2(traj.u.front(), traj.v.front()), Vec2(traj.u.back(), traj.v.back())};
}

double integral_defect(const Trajectory& traj, const IntervalCoefficients& c) {
  const auto& g = traj.grid;
  double scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    scale = std::max({scale, std::abs(traj.u[k]), std::abs(traj.v[k])});
  }
  double image_mass = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) image_mass += g.weights[k] * std::abs(traj.image[k]);
  scale = std::max(scale, image_mass);
  if (scale == 0.0) return 0.0;

  Vec2 defect = Vec2::Zero();
  double worst = 0.0;
  for (std::size_t p = 0; p + 1 < g.panel_bounds.size(); ++p) {
    const std::size_t lo = g.panel_bounds[p], hi = g.panel_bounds[p + 1];
    Vec2 integral = Vec2::Zero();
    for (std::size_t k = lo + 1; k < hi; ++k) {
      const Mat2 A = system_matrix(c, 0.0, g.t[k]);
      Vec2 rhs = A * Vec2(traj.u[k], traj.v[k]);
      rhs(1) -= traj.image[k];
      integral += g.weights[k] * rhs;
    }
    defect += Vec2(traj.u[hi] - traj.u[lo], traj.v[hi] - traj.v[lo]) - integral;
    worst = std::max(worst, defect.cwiseAbs().maxCoeff());
  }
  return worst / scale;
}

double l_residual(const Trajectory& traj, const IntervalCoefficients& c, cplx lambda,
                  const Forcing& h) {
  Trajectory probe = traj;
  for (std::size_t k = 0; k < probe.grid.size(); ++k) {
    probe.image[k] = lambda * probe.u[k] + h(probe.grid.t[k]);
  }
  return integral_defect(probe, c);
}

}  // namespace slmulti
