#include "magnus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slmulti/errors.hpp"

namespace slmulti::detail {

namespace {

Mat3 commutator(const Mat3& x, const Mat3& y) { return x * y - y * x; }

struct EvenSeries {
  cplx cosh;   // cosh(s)
  cplx sinhc;  // sinh(s)/s
  cplx coshm;  // (cosh(s) - 1)/s^2
};

// All three are entire functions of s^2, so the sqrt branch is irrelevant.
EvenSeries even_series(cplx s2) {
  if (std::abs(s2) < 1.0) {
    EvenSeries out{1.0, 1.0, 0.5};
    cplx term = 1.0;  // s^{2j} / (2j)!
    for (int j = 1; j < 14; ++j) {
      term *= s2 / static_cast<double>((2 * j - 1) * (2 * j));
      out.cosh += term;
      out.sinhc += term / static_cast<double>(2 * j + 1);
      out.coshm += term / static_cast<double>((2 * j + 1) * (2 * j + 2));
    }
    return out;
  }
  const cplx s = std::sqrt(s2);
  const cplx ch = std::cosh(s);
  return {ch, std::sinh(s) / s, (ch - 1.0) / s2};
}

}  // namespace

Mat3 expm_augmented(const Mat3& omega) {
  const cplx a = 0.5 * (omega(0, 0) - omega(1, 1));
  Eigen::Matrix2cd B;
  B << a, omega(0, 1), omega(1, 0), -a;
  const Eigen::Vector2cd b(omega(0, 2), omega(1, 2));
  const EvenSeries f = even_series(a * a + omega(0, 1) * omega(1, 0));
  const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  Mat3 out = Mat3::Zero();
  out.topLeftCorner<2, 2>() = f.cosh * I + f.sinhc * B;
  out.topRightCorner<2, 1>() = (f.sinhc * I + f.coshm * B) * b;
  out(2, 2) = 1.0;
  return out;
}

MagnusIntegrator::MagnusIntegrator(const IntervalCoefficients& c, cplx lambda, const Forcing& h,
                                   const PropagationOptions& opts)
    : c_(c), lambda_(lambda), h_(h), opts_(opts) {
  breaks_ = c.breakpoints();
  breaks_.insert(breaks_.end(), h.breakpoints().begin(), h.breakpoints().end());
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
  // Local frequency of the free system grows like sqrt|lambda|.
  max_step_ = std::abs(lambda) > 1.0 ? 1.0 / std::sqrt(std::abs(lambda)) : 1.0;
  step_guess_ = std::min(max_step_, 0.1 * c.length());
}

Mat3 MagnusIntegrator::generator(double t) const {
  const double r = eval_piecewise(c_.r, t);
  const double Q = eval_piecewise(c_.Q, t);
  Mat3 G = Mat3::Zero();
  G(0, 0) = Q * r;
  G(0, 1) = r;
  G(1, 0) = -lambda_ - Q * Q * r;
  G(1, 1) = -Q * r;
  if (!h_.is_zero()) G(1, 2) = -h_(t);
  return G;
}

Mat3 MagnusIntegrator::step(double t, double h) const {
  static const double kNode = std::sqrt(15.0) / 10.0;
  const Mat3 A1 = generator(t + (0.5 - kNode) * h);
  const Mat3 A2 = generator(t + 0.5 * h);
  const Mat3 A3 = generator(t + (0.5 + kNode) * h);
  const Mat3 a1 = h * A2;
  const Mat3 a2 = (std::sqrt(15.0) * h / 3.0) * (A3 - A1);
  const Mat3 a3 = (10.0 * h / 3.0) * (A3 - 2.0 * A2 + A1);
  const Mat3 c1 = commutator(a1, a2);
  const Mat3 c2 = (-1.0 / 60.0) * commutator(a1, 2.0 * a3 + c1);
  const Mat3 omega =
      a1 + a3 / 12.0 + commutator(-20.0 * a1 - a3 + c1, a2 + c2) / 240.0;
  return expm_augmented(omega);
}

void MagnusIntegrator::advance(double t0, double t1, Mat3& P) {
  double t = t0;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t0);
  for (; it != breaks_.end() && *it < t1; ++it) {
    advance_smooth(t, *it, P);
    t = *it;
  }
  advance_smooth(t, t1, P);
}

void MagnusIntegrator::advance_smooth(double t0, double t1, Mat3& P) {
  if (t1 <= t0) return;
  const double len = c_.length();
  const double floor = opts_.min_step * std::max(1.0, len);
  double t = t0;
  double h = std::min(step_guess_, max_step_);
  while (t < t1) {
    const bool last = h >= t1 - t;
    const double hs = last ? t1 - t : h;
    const Mat3 big = step(t, hs);
    const Mat3 small = step(t + 0.5 * hs, 0.5 * hs) * step(t, 0.5 * hs);
    // Richardson estimate for a sixth-order method.
    const double err = (big - small).cwiseAbs().maxCoeff() / 63.0;
    const double allowed = opts_.tol * std::max(hs / len, 1e-3);
    const double ratio = err == 0.0 ? 1e6 : allowed / err;
    if (err <= allowed || hs <= floor) {
      if (err > allowed) {
        std::ostringstream msg;
        msg << "step-size underflow at t = " << t << " (lambda = " << lambda_ << ")";
        throw PropagationError(msg.str(), t);
      }
      P = small * P;
      err_est_ += err * std::max(1.0, P.cwiseAbs().maxCoeff());
      t = last ? t1 : t + hs;
      if (++steps_ > opts_.max_steps) throw PropagationError("step budget exhausted", t);
      if (!last || hs == h) h = std::min(h * std::clamp(0.9 * std::pow(ratio, 1.0 / 7.0), 0.2, 4.0), max_step_);
    } else {
      h = std::max(floor, hs * std::clamp(0.9 * std::pow(ratio, 1.0 / 7.0), 0.1, 0.5));
    }
  }
  step_guess_ = h;
}

}  // namespace slmulti::detail
