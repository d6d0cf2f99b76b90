#include "slmulti/resolvent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slmulti/errors.hpp"
#include "slmulti/spectral.hpp"

namespace slmulti {

KFamily KFamily::constant(MatX K) {
  return {[K = std::move(K)](cplx) { return K; }, HalfPlane::Both};
}

KFamily KFamily::moebius(MatX C0, MatX C1) {
  if (C0.rows() != C1.rows() || C0.cols() != C1.cols()) {
    throw std::invalid_argument("KFamily::moebius: size mismatch");
  }
  return {[C0 = std::move(C0), C1 = std::move(C1)](cplx lambda) {
            return MatX(C0 + (C1 - C0) / (1.0 + std::abs(lambda.imag())));
          },
          HalfPlane::Both};
}

double holomorphy_probe(const KFamily& fam, cplx lambda, double step) {
  const MatX dx = (fam(lambda + step) - fam(lambda - step)) / (2.0 * step);
  const cplx is(0.0, step);
  const MatX dy = (fam(lambda + is) - fam(lambda - is)) / (2.0 * step);
  // d/d(conj z) = (d/dx + i d/dy) / 2
  return (0.5 * (dx + cplx(0.0, 1.0) * dy)).cwiseAbs().maxCoeff();
}

namespace {

GridOptions grid_for(const ResolventOptions& opts, cplx lambda) {
  GridOptions g = opts.grid;
  g.lambda_scale = std::max(g.lambda_scale, std::abs(lambda));
  return g;
}

}  // namespace

ResolventResult apply_resolvent(const ProblemSpec& spec, const BoundaryParameter& bp, cplx lambda,
                                const std::vector<Forcing>& h, const ResolventOptions& opts) {
  const std::size_t m = spec.intervals();
  if (h.size() != m) throw std::invalid_argument("apply_resolvent: need one forcing per interval");
  const CharacteristicMatrix cm = characteristic_matrix(spec, bp, lambda, opts.propagation);
  Eigen::JacobiSVD<MatX> svd(cm.M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= opts.singular_threshold * sv(0)) {
    std::ostringstream msg;
    msg << "lambda in spectrum: lambda = " << lambda << " makes M(lambda) singular";
    throw SpectrumError(msg.str());
  }
  const GridOptions grid = grid_for(opts, lambda);

  // Particular solutions with zero start trace, then fix the boundary
  // condition with homogeneous corrections.
  const VecX zero = VecX::Zero(static_cast<Eigen::Index>(2 * m));
  const MultiFunction particular = solution_from_coefficients(spec, lambda, zero, h, grid, opts.propagation);
  const VecX rhs = -bc_residual(bp, traces(particular));
  const VecX c = svd.solve(rhs);

  ResolventResult out;
  out.y = solution_from_coefficients(spec, lambda, c, h, grid, opts.propagation);
  out.traces = traces(out.y);
  for (std::size_t i = 0; i < m; ++i) {
    out.defect = std::max(out.defect, l_residual(out.y.parts[i], spec.coeffs[i], lambda, h[i]));
  }
  const double trace_size = out.traces.gamma1.cwiseAbs().sum() + out.traces.gamma2.cwiseAbs().sum();
  const double bc = bc_residual(bp, out.traces).cwiseAbs().maxCoeff();
  out.bc_defect = trace_size > 0.0 ? bc / trace_size : bc;
  if (out.defect > opts.tol || out.bc_defect > opts.tol) {
    std::ostringstream msg;
    msg << "resolvent defects above tolerance (l: " << out.defect << ", bc: " << out.bc_defect << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

double resolvent_identity_defect(const ProblemSpec& spec, const BoundaryParameter& bp, cplx lambda,
                                 cplx mu, const std::vector<Forcing>& h,
                                 const ResolventOptions& opts) {
  ResolventOptions shared = opts;
  shared.grid.lambda_scale = std::max({opts.grid.lambda_scale, std::abs(lambda), std::abs(mu)});
  const ResolventResult r_lambda = apply_resolvent(spec, bp, lambda, h, shared);
  const ResolventResult r_mu = apply_resolvent(spec, bp, mu, h, shared);
  std::vector<Forcing> chained;
  for (const auto& part : r_mu.y.parts) chained.push_back(part.as_forcing());
  const ResolventResult r_chain = apply_resolvent(spec, bp, lambda, chained, shared);

  MultiFunction combo = r_lambda.y;
  for (std::size_t i = 0; i < combo.parts.size(); ++i) {
    combo.parts[i] = Trajectory::combine(1.0, r_lambda.y.parts[i], -1.0, r_mu.y.parts[i]);
    combo.parts[i] = Trajectory::combine(1.0, combo.parts[i], -(lambda - mu), r_chain.y.parts[i]);
  }
  // ||h|| on the same grids.
  MultiFunction hs = r_lambda.y;
  for (std::size_t i = 0; i < hs.parts.size(); ++i) {
    auto& part = hs.parts[i];
    for (std::size_t k = 0; k < part.u.size(); ++k) part.u[k] = h[i](part.grid.t[k]);
  }
  const double h_norm = l2_norm(hs);
  const double diff = l2_norm(combo);
  return h_norm > 0.0 ? diff / h_norm : diff;
}

ResolventResult generalized_resolvent(const ProblemSpec& spec, const KFamily& fam, cplx lambda,
                                      const std::vector<Forcing>& h, const ResolventOptions& opts) {
  if (lambda.imag() == 0.0) {
    throw std::invalid_argument("generalized_resolvent: lambda must be non-real");
  }
  const Sign sign = lambda.imag() < 0.0 ? Sign::Plus : Sign::Minus;
  if ((sign == Sign::Plus && fam.declared == HalfPlane::Upper) ||
      (sign == Sign::Minus && fam.declared == HalfPlane::Lower)) {
    throw std::invalid_argument("generalized_resolvent: family not declared on this half-plane");
  }
  BoundaryParameter bp = BoundaryParameter::make(fam(lambda), sign);
  if (!bp.flags.is_contraction) {
    std::ostringstream msg;
    msg << "K(lambda) is not a contraction at lambda = " << lambda << " (norm " << bp.flags.norm << ")";
    throw ValidationError(msg.str());
  }
  try {
    return apply_resolvent(spec, bp, lambda, h, opts);
  } catch (const SpectrumError& e) {
    throw NumericalError(std::string("generalized resolvent: singular characteristic matrix off the real axis: ") +
                         e.what());
  }
}

}  // namespace slmulti
