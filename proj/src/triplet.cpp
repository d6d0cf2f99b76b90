#include "slmulti/triplet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace slmulti {

TraceVector traces(const MultiFunction& f) {
  const auto n = static_cast<Eigen::Index>(2 * f.parts.size());
  TraceVector tv{VecX::Zero(n), VecX::Zero(n)};
  for (std::size_t i = 0; i < f.parts.size(); ++i) {
    const auto ends = quasi_derivative_traces(f.parts[i]);
    const auto s = static_cast<Eigen::Index>(2 * i);
    tv.gamma1(s) = ends.start(1);
    tv.gamma1(s + 1) = -ends.end(1);
    tv.gamma2(s) = ends.start(0);
    tv.gamma2(s + 1) = ends.end(0);
  }
  return tv;
}

cplx dot(const VecX& x, const VecX& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  // Eigen's dot conjugates the first argument.
  return y.dot(x);
}

namespace {

template <typename Left, typename Right>
cplx pair_sum(const MultiFunction& f, const MultiFunction& g, Left left, Right right) {
  if (f.parts.size() != g.parts.size()) throw std::invalid_argument("interval count mismatch");
  cplx acc{};
  for (std::size_t i = 0; i < f.parts.size(); ++i) {
    const auto& a = f.parts[i];
    const auto& b = g.parts[i];
    if (a.grid.t != b.grid.t) throw std::invalid_argument("sample grids differ");
    for (std::size_t k = 0; k < a.grid.size(); ++k) {
      acc += a.grid.weights[k] * left(a, k) * std::conj(right(b, k));
    }
  }
  return acc;
}

cplx u_at(const Trajectory& t, std::size_t k) { return t.u[k]; }
cplx image_at(const Trajectory& t, std::size_t k) { return t.image[k]; }

}  // namespace

cplx inner_product(const MultiFunction& f, const MultiFunction& g) {
  return pair_sum(f, g, u_at, u_at);
}

cplx image_inner_product(const MultiFunction& f, const MultiFunction& g) {
  return pair_sum(f, g, image_at, u_at);
}

double l2_norm(const MultiFunction& f) { return std::sqrt(std::abs(inner_product(f, f))); }

double l2_distance(const MultiFunction& f, const MultiFunction& g) {
  if (f.parts.size() != g.parts.size()) throw std::invalid_argument("interval count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.parts.size(); ++i) {
    const auto& a = f.parts[i];
    const auto& b = g.parts[i];
    if (a.grid.t != b.grid.t) throw std::invalid_argument("sample grids differ");
    for (std::size_t k = 0; k < a.grid.size(); ++k) acc += a.grid.weights[k] * std::norm(a.u[k] - b.u[k]);
  }
  return std::sqrt(acc);
}

GreenDefect green_identity_defect(const MultiFunction& f, const MultiFunction& g) {
  const cplx lf_g = image_inner_product(f, g);
  const cplx f_lg = std::conj(image_inner_product(g, f));
  const TraceVector tf = traces(f);
  const TraceVector tg = traces(g);
  const cplx g12 = dot(tf.gamma1, tg.gamma2);
  const cplx g21 = dot(tf.gamma2, tg.gamma1);
  GreenDefect out;
  out.lhs = lf_g - f_lg;
  out.rhs = g12 - g21;
  out.defect = out.lhs - out.rhs;
  out.scale = std::max({std::abs(lf_g), std::abs(f_lg), std::abs(g12), std::abs(g21)});
  return out;
}

SurjectivityCertificate trace_surjectivity_certificate(const ProblemSpec& spec,
                                                       const PropagationOptions& opts) {
  const std::size_t m = spec.intervals();
  const auto n = static_cast<Eigen::Index>(4 * m);
  MatX traces_matrix = MatX::Zero(n, n);
  Eigen::Index col = 0;
  for (const cplx lambda : {cplx{0.0, 1.0}, cplx{0.0, -1.0}}) {
    for (std::size_t i = 0; i < m; ++i) {
      const Mat2 T = transfer_matrix(spec.coeffs[i], lambda, opts, i).T;
      const auto s = static_cast<Eigen::Index>(2 * i);
      for (int k = 0; k < 2; ++k, ++col) {
        const Vec2 start = Vec2::Unit(k);
        const Vec2 end = T * start;
        traces_matrix(s, col) = start(1);
        traces_matrix(s + 1, col) = -end(1);
        traces_matrix(n / 2 + s, col) = start(0);
        traces_matrix(n / 2 + s + 1, col) = end(0);
      }
    }
  }
  Eigen::JacobiSVD<MatX> svd(traces_matrix);
  const auto& sv = svd.singularValues();
  SurjectivityCertificate cert;
  cert.expected = static_cast<int>(n);
  const double cutoff = sv(0) * 1e-10;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    cert.singular_values.push_back(sv(k));
    if (sv(k) > cutoff) ++cert.rank;
  }
  return cert;
}

MultiFunction random_multifunction(const ProblemSpec& spec, std::mt19937_64& rng,
                                   const GridOptions& grid, const PropagationOptions& opts) {
  static const std::array<cplx, 6> kLambdas{cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(2.5, 0.0),
                                            cplx(-3.0, 2.0), cplx(0.7, -1.1), cplx(9.0, 0.5)};
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> pick(0, kLambdas.size() - 1);
  auto gauss = [&] { return cplx(normal(rng), normal(rng)); };
  MultiFunction f;
  for (std::size_t i = 0; i < spec.intervals(); ++i) {
    const auto& c = spec.coeffs[i];
    const SampleGrid g = SampleGrid::gauss(c, grid);
    const Trajectory hom = propagate_solution(c, kLambdas[pick(rng)], Forcing::zero(),
                                              Vec2(gauss(), gauss()), g, opts, i);
    const cplx a0 = gauss(), a1 = gauss(), a2 = gauss();
    const double left = c.left();
    const Forcing h([=](double t) { return a0 + a1 * (t - left) + a2 * (t - left) * (t - left); }, {});
    const Trajectory part = propagate_solution(c, kLambdas[pick(rng)], h, Vec2(gauss(), gauss()), g, opts, i);
    f.parts.push_back(Trajectory::combine(gauss(), hom, gauss(), part));
  }
  return f;
}

}  // namespace slmulti
