#pragma once

// Test-only oracles and generators. Nothing here calls the adaptive
// integrator or the spectral search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "slmulti/coeffs.hpp"
#include "slmulti/extensions.hpp"
#include "slmulti/types.hpp"

namespace testing {

using slmulti::cplx;
using slmulti::Mat2;
using slmulti::MatX;

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& x) {
  return x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
}

// A(t) straight from r and Q.
inline Mat2 generator(const slmulti::IntervalCoefficients& c, cplx lambda, double t) {
  const double r = c.r(t), q = c.Q(t);
  Mat2 A;
  A << q * r, r, -lambda - q * q * r, -q * r;
  return A;
}

// Classical RK4 with n equal steps between consecutive breakpoints.
inline Mat2 rk4_transfer(const slmulti::IntervalCoefficients& c, cplx lambda, int n) {
  Mat2 T = Mat2::Identity();
  const auto breaks = c.breakpoints();
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double a = breaks[j], b = breaks[j + 1], h = (b - a) / n;
    // Evaluate just inside the piece so the one-sided limits are used.
    const double eps = 1e-14 * std::max(1.0, std::abs(b));
    auto A = [&](double t) { return generator(c, lambda, std::clamp(t, a + eps, b - eps)); };
    for (int k = 0; k < n; ++k) {
      const double t = a + k * h;
      const Mat2 k1 = A(t) * T;
      const Mat2 k2 = A(t + h / 2) * (T + h / 2 * k1);
      const Mat2 k3 = A(t + h / 2) * (T + h / 2 * k2);
      const Mat2 k4 = A(t + h) * (T + h * k3);
      T += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return T;
}

// exp(A) by scaling and squaring with a long Taylor series.
inline Mat2 taylor_expm(const Mat2& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const Mat2 B = A / std::ldexp(1.0, s);
  Mat2 term = Mat2::Identity(), sum = Mat2::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

inline cplx random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng)};
}

inline MatX random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  MatX X(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) X(i, j) = random_complex(rng);
  return X;
}

inline MatX random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<MatX> qr(random_matrix(rng, n));
  MatX Q = qr.householderQ();
  // Fix the phases so the distribution is Haar.
  const MatX R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) Q.col(j) *= std::polar(1.0, std::arg(R(j, j)));
  return Q;
}

// U U^T is unitary and symmetric.
inline MatX random_symmetric_unitary(std::mt19937_64& rng, Eigen::Index n) {
  const MatX U = random_unitary(rng, n);
  return U * U.transpose();
}

inline MatX random_contraction(std::mt19937_64& rng, Eigen::Index n, double norm) {
  const MatX X = random_matrix(rng, n);
  Eigen::JacobiSVD<MatX> svd(X);
  return X * (norm / svd.singularValues()(0));
}

struct SpecShape {
  double a = 0.0, b = 1.0;
  std::size_t intervals = 1;
  int max_pieces = 3;
  int max_degree = 3;
  double r_min = 0.5, r_max = 2.0;
  double q_max = 2.0;
};

// Piecewise polynomial whose values stay in [lo, hi]: a random offset plus a
// small Legendre-like perturbation, written in local coordinates.
inline slmulti::PiecewisePoly random_poly(std::mt19937_64& rng, double a, double b, const SpecShape& shape,
                                          double lo, double hi) {
  std::uniform_int_distribution<int> pieces(1, shape.max_pieces);
  std::uniform_int_distribution<int> degree(0, shape.max_degree);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = pieces(rng);
  std::vector<double> cuts;
  for (int k = 1; k < n; ++k) cuts.push_back(a + (b - a) * (0.1 + 0.8 * unit(rng)));
  std::sort(cuts.begin(), cuts.end());
  slmulti::PiecewisePoly f;
  f.knots.push_back(a);
  for (double x : cuts) {
    if (x - f.knots.back() > 1e-3 * (b - a)) f.knots.push_back(x);
  }
  if (b - f.knots.back() < 1e-3 * (b - a)) f.knots.pop_back();
  f.knots.push_back(b);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (std::size_t j = 0; j + 1 < f.knots.size(); ++j) {
    const double len = f.knots[j + 1] - f.knots[j];
    const int d = degree(rng);
    // Sum of |c_k| len^k bounded by half keeps values within [lo, hi].
    std::vector<double> c(d + 1);
    c[0] = mid + half * 0.5 * (2 * unit(rng) - 1);
    double budget = half * 0.5;
    for (int k = 1; k <= d; ++k) {
      const double share = budget * unit(rng) / (d - k + 1);
      c[k] = (2 * unit(rng) - 1) * share / std::pow(len, k);
      budget -= std::abs(c[k]) * std::pow(len, k);
    }
    f.pieces.push_back(c);
  }
  return f;
}

inline slmulti::ProblemSpec random_spec(std::mt19937_64& rng, const SpecShape& shape) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  slmulti::ProblemSpec spec;
  spec.partition.points.push_back(shape.a);
  for (std::size_t k = 1; k < shape.intervals; ++k) {
    spec.partition.points.push_back(shape.a + (shape.b - shape.a) * (k + 0.6 * (unit(rng) - 0.5)) /
                                                  static_cast<double>(shape.intervals));
  }
  spec.partition.points.push_back(shape.b);
  for (std::size_t i = 0; i < shape.intervals; ++i) {
    const double a = spec.partition.points[i], b = spec.partition.points[i + 1];
    spec.coeffs.push_back({random_poly(rng, a, b, shape, shape.r_min, shape.r_max),
                           random_poly(rng, a, b, shape, -shape.q_max, shape.q_max)});
  }
  return spec;
}

}  // namespace testing
