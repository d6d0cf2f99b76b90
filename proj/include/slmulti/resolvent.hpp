#pragma once

#include <functional>
#include <vector>

#include "slmulti/coeffs.hpp"
#include "slmulti/extensions.hpp"
#include "slmulti/propagate.hpp"
#include "slmulti/shinzettl.hpp"
#include "slmulti/triplet.hpp"

namespace slmulti {

enum class HalfPlane { Lower, Upper, Both };

/// Boundary parameter K(lambda) of a generalized resolvent. Holomorphy is the
/// caller's contract; holomorphy_probe spot-checks it.
struct KFamily {
  std::function<MatX(cplx)> evaluator;
  HalfPlane declared = HalfPlane::Both;

  static KFamily constant(MatX K);
  /// K(lambda) = C0 + (C1 - C0) / (1 + |Im lambda|).
  static KFamily moebius(MatX C0, MatX C1);

  MatX operator()(cplx lambda) const { return evaluator(lambda); }
};

/// Finite-difference d/d(conj lambda) of the family, max entry; zero for a
/// holomorphic family.
double holomorphy_probe(const KFamily& fam, cplx lambda, double step = 1e-5);

struct ResolventOptions {
  PropagationOptions propagation;
  GridOptions grid;
  /// Bound on both returned defects.
  double tol = 1e-8;
  /// M(lambda) with sigma_min / sigma_max below this is treated as singular.
  double singular_threshold = 1e-11;
};

struct ResolventResult {
  MultiFunction y;
  TraceVector traces;
  double defect = 0.0;     // max l-residual over intervals
  double bc_defect = 0.0;  // |bc residual| / (|G1 y| + |G2 y|)
};

/// y = (L - lambda)^{-1} h for the extension selected by bp. Throws
/// SpectrumError when M(lambda) is singular.
ResolventResult apply_resolvent(const ProblemSpec& spec, const BoundaryParameter& bp, cplx lambda,
                                const std::vector<Forcing>& h, const ResolventOptions& opts = {});

/// ||R_l h - R_m h - (l - m) R_l R_m h|| / ||h||.
double resolvent_identity_defect(const ProblemSpec& spec, const BoundaryParameter& bp, cplx lambda,
                                 cplx mu, const std::vector<Forcing>& h,
                                 const ResolventOptions& opts = {});

/// Generalized resolvent for the family: sign plus for Im lambda < 0, sign
/// minus for Im lambda > 0.
ResolventResult generalized_resolvent(const ProblemSpec& spec, const KFamily& fam, cplx lambda,
                                      const std::vector<Forcing>& h,
                                      const ResolventOptions& opts = {});

}  // namespace slmulti
