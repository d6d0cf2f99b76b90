#include "slmulti/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "slmulti/errors.hpp"
#include "slmulti/parallel.hpp"

namespace slmulti {

namespace {

constexpr double kPi = std::numbers::pi;

class DetEvaluator {
 public:
  DetEvaluator(const ProblemSpec& spec, const BoundaryParameter& bp, const PropagationOptions& opts)
      : spec_(spec), bp_(bp), opts_(opts) {}

  cplx operator()(cplx z) const { return characteristic_matrix(spec_, bp_, z, opts_).determinant(); }

 private:
  const ProblemSpec& spec_;
  const BoundaryParameter& bp_;
  PropagationOptions opts_;
};

struct Polished {
  cplx z;
  bool converged = false;
};

// Newton on det M with a central-difference derivative; `order` > 1 applies
// the multiplicity-corrected step.
Polished polish(const DetEvaluator& f, cplx z, int order, int max_iter = 80) {
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const cplx fz = f(z);
    if (fz == 0.0) return {z, true};
    const double delta = 1e-6 * std::max(1.0, std::abs(z));
    const cplx df = (f(z + delta) - f(z - delta)) / (2.0 * delta);
    if (df == 0.0 || !std::isfinite(std::abs(df)) || !std::isfinite(std::abs(fz))) return {z, false};
    const cplx step = static_cast<double>(order) * fz / df;
    z -= step;
    last_step = std::abs(step);
    if (last_step <= 1e-14 * std::max(1.0, std::abs(z))) return {z, true};
  }
  return {z, last_step <= 1e-10 * std::max(1.0, std::abs(z))};
}

struct Kernel {
  int dimension = 0;
  std::vector<VecX> vectors;
  double sigma_ratio = 1.0;  // sigma_min / sigma_max
};

Kernel kernel_of(const MatX& M, double tol) {
  Eigen::JacobiSVD<MatX> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv(0);
  const Eigen::Index last = sv.size() - 1;
  Kernel k;
  k.sigma_ratio = top > 0.0 ? sv(last) / top : 0.0;
  for (Eigen::Index j = last; j >= 0 && sv(j) <= tol * top; --j) {
    k.vectors.push_back(svd.matrixV().col(j));
    ++k.dimension;
  }
  // Closest singular direction; callers decide whether it is a kernel.
  if (k.vectors.empty()) k.vectors.push_back(svd.matrixV().col(last));
  return k;
}

// Argument change of f along [a, b], bisecting until each piece turns by
// less than pi/4.
class ContourWalker {
 public:
  ContourWalker(const DetEvaluator& f, double osc_length) : f_(f), osc_(osc_length) {}

  double edge(cplx a, cplx b) const {
    const double len = std::abs(b - a);
    const double zmax = std::max(std::abs(a), std::abs(b));
    const double spacing = 0.5 * std::max(1.0, std::sqrt(zmax)) / osc_;
    const int n = std::max(8, static_cast<int>(std::ceil(len / spacing)));
    cplx za = a;
    cplx fa = checked(a);
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
      const cplx zb = j == n ? b : a + (b - a) * (static_cast<double>(j) / n);
      const cplx fb = checked(zb);
      total += segment(za, fa, zb, fb, 0);
      za = zb;
      fa = fb;
    }
    return total;
  }

  int winding(const Rect& r) const {
    const std::array<cplx, 4> corners{cplx(r.re_min, r.im_min), cplx(r.re_max, r.im_min),
                                      cplx(r.re_max, r.im_max), cplx(r.re_min, r.im_max)};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) total += edge(corners[e], corners[(e + 1) % 4]);
    const double w = total / (2.0 * kPi);
    if (std::abs(w - std::round(w)) > 0.1) {
      std::ostringstream msg;
      msg << "non-integer winding number " << w << " on contour";
      throw NumericalError(msg.str());
    }
    return static_cast<int>(std::lround(w));
  }

 private:
  cplx checked(cplx z) const {
    const cplx v = f_(z);
    if (v == 0.0 || !std::isfinite(std::abs(v))) {
      std::ostringstream msg;
      msg << "det M vanishes or overflows on the contour at " << z;
      throw ZeroOnContourError(msg.str());
    }
    return v;
  }

  double segment(cplx za, cplx fa, cplx zb, cplx fb, int depth) const {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < kPi / 4.0) return d;
    if (depth > 44) {
      std::ostringstream msg;
      msg << "zero of det M on or near the contour between " << za << " and " << zb;
      throw ZeroOnContourError(msg.str());
    }
    const cplx zm = 0.5 * (za + zb);
    const cplx fm = checked(zm);
    return segment(za, fa, zm, fm, depth + 1) + segment(zm, fm, zb, fb, depth + 1);
  }

  const DetEvaluator& f_;
  double osc_;
};

bool inside(const Rect& r, cplx z, double margin) {
  return z.real() >= r.re_min - margin && z.real() <= r.re_max + margin &&
         z.imag() >= r.im_min - margin && z.imag() <= r.im_max + margin;
}

struct RegionSolver {
  const ProblemSpec& spec;
  const BoundaryParameter& bp;
  const SpectralOptions& opts;
  DetEvaluator f;
  ContourWalker walker;
  std::vector<std::pair<cplx, int>> roots;

  RegionSolver(const ProblemSpec& s, const BoundaryParameter& b, const SpectralOptions& o)
      : spec(s), bp(b), opts(o), f(s, b, o.propagation), walker(f, oscillation_length(s)) {}

  void solve(const Rect& r, int count, int depth) {
    if (count <= 0) return;
    const cplx center(0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max));
    const double size = std::max(r.re_max - r.re_min, r.im_max - r.im_min);
    if (count == 1) {
      const Polished p = polish(f, center, 1);
      if (p.converged && inside(r, p.z, 1e-9 * std::max(1.0, size))) {
        roots.emplace_back(p.z, 1);
        return;
      }
    }
    if (count > 1) {
      // A semisimple multiple root: the kernel dimension confirms the order.
      const Polished p = polish(f, center, count);
      if (p.converged && inside(r, p.z, 1e-9 * std::max(1.0, size)) &&
          kernel_of(characteristic_matrix(spec, bp, p.z, opts.propagation).M, opts.multiplicity_tol).dimension ==
              count) {
        roots.emplace_back(p.z, count);
        return;
      }
    }
    // det M near a k-fold zero sinks into rounding once the cell is ~eps^(1/k).
    const double floor = count == 1 ? 1e-9 : 1e-6;
    if (size < floor * std::max(1.0, std::abs(center)) || depth >= opts.max_depth) {
      const Polished p = polish(f, center, count);
      if (!p.converged) throw NumericalError("root polishing failed in a minimal contour cell");
      roots.emplace_back(p.z, count);
      return;
    }
    static constexpr std::array<std::pair<double, double>, 5> kSplits{
        {{0.5, 0.5}, {0.4813, 0.5317}, {0.5371, 0.4629}, {0.4561, 0.4713}, {0.5519, 0.5447}}};
    for (const auto& [fx, fy] : kSplits) {
      const double xm = r.re_min + fx * (r.re_max - r.re_min);
      const double ym = r.im_min + fy * (r.im_max - r.im_min);
      const std::array<Rect, 4> kids{Rect{r.re_min, xm, r.im_min, ym}, Rect{xm, r.re_max, r.im_min, ym},
                                     Rect{xm, r.re_max, ym, r.im_max}, Rect{r.re_min, xm, ym, r.im_max}};
      std::array<int, 4> counts{};
      try {
        for (int k = 0; k < 4; ++k) counts[k] = walker.winding(kids[k]);
      } catch (const ZeroOnContourError&) {
        continue;
      }
      if (counts[0] + counts[1] + counts[2] + counts[3] != count) continue;
      for (int k = 0; k < 4; ++k) solve(kids[k], counts[k], depth + 1);
      return;
    }
    throw NumericalError("inconsistent zero counts during contour subdivision");
  }
};

Eigenpair make_eigenpair(const ProblemSpec& spec, const BoundaryParameter& bp, cplx lambda,
                         int multiplicity, const SpectralOptions& opts) {
  const CharacteristicMatrix cm = characteristic_matrix(spec, bp, lambda, opts.propagation);
  Kernel k = kernel_of(cm.M, opts.multiplicity_tol);
  Eigenpair ep;
  ep.lambda = lambda;
  ep.multiplicity = multiplicity > 0 ? multiplicity : std::max(1, k.dimension);
  ep.coefficients = std::move(k.vectors);
  return ep;
}

void attach_functions(const ProblemSpec& spec, std::vector<Eigenpair>& pairs,
                      const SpectralOptions& opts) {
  GridOptions grid = opts.grid;
  for (const auto& ep : pairs) grid.lambda_scale = std::max(grid.lambda_scale, std::abs(ep.lambda));
  for (auto& ep : pairs) {
    for (const auto& c : ep.coefficients) {
      MultiFunction fn = solution_from_coefficients(spec, ep.lambda, c, {}, grid, opts.propagation);
      const double norm = l2_norm(fn);
      for (auto& part : fn.parts) {
        for (auto& x : part.u) x /= norm;
        for (auto& x : part.v) x /= norm;
        for (auto& x : part.image) x /= norm;
      }
      ep.functions.push_back(std::move(fn));
    }
  }
}

void sort_pairs(std::vector<Eigenpair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const Eigenpair& a, const Eigenpair& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
}

void require_classified(const BoundaryParameter& bp, std::size_t m) {
  if (bp.K.rows() != static_cast<Eigen::Index>(2 * m) || bp.K.cols() != bp.K.rows()) {
    throw std::invalid_argument("boundary parameter size does not match the partition");
  }
  if (bp.flags.kind == ExtensionKind::NotClassified) {
    throw ValidationError("boundary parameter K is not a contraction (NotClassified)");
  }
}

}  // namespace

cplx CharacteristicMatrix::scaled_determinant() const {
  MatX scaled = M;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double top = scaled.col(j).cwiseAbs().maxCoeff();
    if (top > 0.0) {
      int e = 0;
      std::frexp(top, &e);
      scaled.col(j) *= std::ldexp(1.0, -e);
    }
  }
  return Eigen::PartialPivLU<MatX>(scaled).determinant();
}

cplx CharacteristicMatrix::determinant() const {
  return scaled_determinant() * std::ldexp(1.0, scale_exp);
}

CharacteristicMatrix characteristic_matrix(const ProblemSpec& spec, const BoundaryParameter& bp,
                                           cplx lambda, const PropagationOptions& opts) {
  const std::size_t m = spec.intervals();
  require_classified(bp, m);
  const auto n = static_cast<Eigen::Index>(2 * m);
  CharacteristicMatrix cm{lambda, MatX::Zero(n, n), 0};
  const MatX I = MatX::Identity(n, n);
  const cplx s = bp.sign == Sign::Plus ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
  const MatX G1 = bp.K - I;
  const MatX G2 = s * (bp.K + I);
  for (std::size_t i = 0; i < m; ++i) {
    const Mat2 T = transfer_matrix(spec.coeffs[i], lambda, opts, i).T;
    const auto slot = static_cast<Eigen::Index>(2 * i);
    for (int k = 0; k < 2; ++k) {
      const Vec2 start = Vec2::Unit(k);
      const Vec2 end = T * start;
      const Eigen::Index col = slot + k;
      // Only the two trace slots of interval i are non-zero.
      cm.M.col(col) = G1.col(slot) * start(1) - G1.col(slot + 1) * end(1) +
                      G2.col(slot) * start(0) + G2.col(slot + 1) * end(0);
      const double top = cm.M.col(col).cwiseAbs().maxCoeff();
      if (top > 0.0) {
        int e = 0;
        std::frexp(top, &e);
        cm.scale_exp += e;
      }
    }
  }
  return cm;
}

double oscillation_length(const ProblemSpec& spec) {
  double total = 0.0;
  for (const auto& c : spec.coeffs) {
    double rmax = 0.0;
    for (int k = 0; k <= 32; ++k) {
      const double t = c.left() + c.length() * k / 32.0;
      rmax = std::max(rmax, std::abs(eval_piecewise(c.r, t)));
    }
    total += c.length() * std::sqrt(rmax);
  }
  return std::max(total, 1e-6);
}

int count_eigenvalues(const ProblemSpec& spec, const BoundaryParameter& bp, const Rect& rect,
                      const SpectralOptions& opts) {
  require_classified(bp, spec.intervals());
  const DetEvaluator f(spec, bp, opts.propagation);
  return ContourWalker(f, oscillation_length(spec)).winding(rect);
}

RegionSearch find_eigenvalues_region(const ProblemSpec& spec, const BoundaryParameter& bp,
                                     const Rect& rect, const SpectralOptions& opts) {
  require_classified(bp, spec.intervals());
  if (!(rect.re_max > rect.re_min) || !(rect.im_max > rect.im_min)) {
    throw std::invalid_argument("find_eigenvalues_region: degenerate rectangle");
  }
  RegionSolver solver(spec, bp, opts);
  RegionSearch out;
  Rect r = rect;
  const double size = std::max(rect.re_max - rect.re_min, rect.im_max - rect.im_min);
  for (int attempt = 0;; ++attempt) {
    try {
      out.winding = solver.walker.winding(r);
      break;
    } catch (const ZeroOnContourError&) {
      if (attempt >= 5) throw;
      const double grow = 1e-6 * size * (attempt + 1) * 1.618;
      r = Rect{r.re_min - grow, r.re_max + grow, r.im_min - grow, r.im_max + grow};
      ++out.perturbations;
    }
  }
  solver.solve(r, out.winding, 0);
  for (const auto& [z, mult] : solver.roots) {
    out.eigenpairs.push_back(make_eigenpair(spec, bp, z, mult, opts));
  }
  sort_pairs(out.eigenpairs);
  if (opts.max_eigs > 0 && out.eigenpairs.size() > opts.max_eigs) out.eigenpairs.resize(opts.max_eigs);
  if (opts.compute_functions) attach_functions(spec, out.eigenpairs, opts);
  return out;
}

std::vector<Eigenpair> find_eigenvalues_real(const ProblemSpec& spec, const BoundaryParameter& bp,
                                             double lmin, double lmax, const SpectralOptions& opts) {
  require_classified(bp, spec.intervals());
  if (bp.flags.kind != ExtensionKind::SelfAdjoint && bp.flags.kind != ExtensionKind::SelfAdjointReal) {
    throw ValidationError("real eigenvalue search requires a self-adjoint extension (unitary K)");
  }
  if (!std::isfinite(lmin) || !std::isfinite(lmax) || !(lmax > lmin)) {
    throw std::invalid_argument("find_eigenvalues_real: need finite lmin < lmax");
  }
  const DetEvaluator f(spec, bp, opts.propagation);
  const double osc = oscillation_length(spec);
  const double dk = kPi / (16.0 * osc);
  const double kmin = kPi / osc;

  std::vector<double> xs{lmin};
  while (xs.back() < lmax) {
    const double x = xs.back();
    const double step = std::min(1.0, 2.0 * std::max(std::sqrt(std::max(x, 0.0)), kmin) * dk);
    xs.push_back(std::min(lmax, x + step));
  }
  std::vector<double> mags(xs.size());
  parallel_for(xs.size(), [&](std::size_t k) { mags[k] = std::abs(f(xs[k])); });

  const double span = lmax - lmin;
  const double slack = 1e-6 * std::max(1.0, span);
  std::vector<cplx> found;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const bool left_ok = k == 0 || mags[k] <= mags[k - 1];
    const bool right_ok = k + 1 == xs.size() || mags[k] <= mags[k + 1];
    if (!(left_ok && right_ok)) continue;
    const Polished p = polish(f, xs[k], 1);
    if (!p.converged) continue;
    const cplx z = p.z;
    if (std::abs(z.imag()) > opts.real_tol * std::max(1.0, std::abs(z))) continue;
    if (z.real() < lmin - slack || z.real() > lmax + slack) continue;
    found.emplace_back(z.real(), 0.0);
  }
  std::sort(found.begin(), found.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  std::vector<cplx> unique;
  for (const cplx z : found) {
    if (!unique.empty() &&
        std::abs(z - unique.back()) <= 1e-7 * std::max(1.0, std::abs(z))) {
      continue;
    }
    unique.push_back(z);
  }
  std::vector<Eigenpair> pairs;
  for (const cplx z : unique) pairs.push_back(make_eigenpair(spec, bp, z, 0, opts));

  if (opts.cross_check) {
    int total = 0;
    for (const auto& ep : pairs) total += ep.multiplicity;
    const Rect rect{lmin - slack, lmax + slack, -0.5, 0.5};
    RegionSearch region;
    bool mismatch = false;
    try {
      mismatch = count_eigenvalues(spec, bp, rect, opts) != total;
    } catch (const ZeroOnContourError&) {
      mismatch = true;
    }
    if (mismatch) {
      SpectralOptions inner = opts;
      inner.compute_functions = false;
      inner.max_eigs = 0;
      region = find_eigenvalues_region(spec, bp, rect, inner);
      pairs.clear();
      for (const auto& ep : region.eigenpairs) {
        const cplx z = ep.lambda;
        if (std::abs(z.imag()) > opts.real_tol * std::max(1.0, std::abs(z))) continue;
        pairs.push_back(make_eigenpair(spec, bp, cplx(z.real(), 0.0), 0, opts));
      }
    }
  }
  sort_pairs(pairs);
  if (opts.max_eigs > 0 && pairs.size() > opts.max_eigs) pairs.resize(opts.max_eigs);
  if (opts.compute_functions) attach_functions(spec, pairs, opts);
  return pairs;
}

Eigenpair eigenfunction(const ProblemSpec& spec, const BoundaryParameter& bp, cplx lambda,
                        const SpectralOptions& opts) {
  const CharacteristicMatrix cm = characteristic_matrix(spec, bp, lambda, opts.propagation);
  const Kernel k = kernel_of(cm.M, opts.multiplicity_tol);
  if (k.sigma_ratio > opts.eigen_threshold) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " is not an eigenvalue (sigma_min/sigma_max = " << k.sigma_ratio
        << ")";
    throw NotAnEigenvalueError(msg.str());
  }
  Eigenpair ep;
  ep.lambda = lambda;
  ep.multiplicity = std::max(1, k.dimension);
  ep.coefficients = k.vectors;
  std::vector<Eigenpair> one{std::move(ep)};
  SpectralOptions local = opts;
  local.grid.lambda_scale = std::max(opts.grid.lambda_scale, std::abs(lambda));
  attach_functions(spec, one, local);
  return std::move(one.front());
}

MultiFunction solution_from_coefficients(const ProblemSpec& spec, cplx lambda, const VecX& c,
                                         const std::vector<Forcing>& h, const GridOptions& grid,
                                         const PropagationOptions& opts) {
  const std::size_t m = spec.intervals();
  if (c.size() != static_cast<Eigen::Index>(2 * m)) {
    throw std::invalid_argument("solution_from_coefficients: coefficient size mismatch");
  }
  if (!h.empty() && h.size() != m) {
    throw std::invalid_argument("solution_from_coefficients: need one forcing per interval");
  }
  MultiFunction out;
  out.parts.resize(m);
  const Forcing none;
  parallel_for(m, [&](std::size_t i) {
    const auto& coeffs = spec.coeffs[i];
    const SampleGrid g = SampleGrid::gauss(coeffs, grid);
    const auto slot = static_cast<Eigen::Index>(2 * i);
    out.parts[i] = propagate_solution(coeffs, lambda, h.empty() ? none : h[i],
                                      Vec2(c(slot), c(slot + 1)), g, opts, i);
  });
  return out;
}

double realness_defect(const MultiFunction& f) {
  cplx square{};
  double top = 0.0;
  for (const auto& part : f.parts) {
    for (std::size_t k = 0; k < part.u.size(); ++k) {
      square += part.grid.weights[k] * part.u[k] * part.u[k];
      top = std::max(top, std::abs(part.u[k]));
    }
  }
  if (top == 0.0) return 0.0;
  const cplx rotation = std::polar(1.0, -0.5 * std::arg(square));
  double worst = 0.0;
  for (const auto& part : f.parts) {
    for (const cplx x : part.u) worst = std::max(worst, std::abs((rotation * x).imag()));
  }
  return worst / top;
}

}  // namespace slmulti
