#pragma once

#include <random>
#include <vector>

#include "slmulti/coeffs.hpp"
#include "slmulti/propagate.hpp"
#include "slmulti/shinzettl.hpp"
#include "slmulti/types.hpp"

namespace slmulti {

/// Boundary values (Gamma_1 y, Gamma_2 y) in C^{2m}. For interval i, slots
/// 2i and 2i+1 hold (D1 y(a_{i-1}+), -D1 y(a_i-)) in gamma1 and
/// (y(a_{i-1}+), y(a_i-)) in gamma2.
struct TraceVector {
  VecX gamma1;
  VecX gamma2;
};

/// Element of the direct-sum maximal domain: one trajectory per cell, no
/// matching imposed at interior nodes.
struct MultiFunction {
  std::vector<Trajectory> parts;

  std::size_t intervals() const { return parts.size(); }
};

TraceVector traces(const MultiFunction& f);

/// (f, g) in L2(a, b), conjugate-linear in g.
cplx inner_product(const MultiFunction& f, const MultiFunction& g);
/// (L_max f, g) from the stored images.
cplx image_inner_product(const MultiFunction& f, const MultiFunction& g);
double l2_norm(const MultiFunction& f);
/// ||f - g||_{L2}; grids must agree.
double l2_distance(const MultiFunction& f, const MultiFunction& g);

/// (x, y) in C^n, conjugate-linear in y.
cplx dot(const VecX& x, const VecX& y);

struct GreenDefect {
  cplx defect;
  /// Largest of |(Lf,g)|, |(f,Lg)|, |(G1 f,G2 g)|, |(G2 f,G1 g)|.
  double scale = 0.0;
  cplx lhs;
  cplx rhs;
};

/// (L f, g) - (f, L g) - [(G1 f, G2 g) - (G2 f, G1 g)].
GreenDefect green_identity_defect(const MultiFunction& f, const MultiFunction& g);

struct SurjectivityCertificate {
  int rank = 0;
  int expected = 0;
  std::vector<double> singular_values;

  bool full() const { return rank == expected; }
};

/// Rank of the 4m x 4m matrix of (Gamma_1, Gamma_2) applied to homogeneous
/// solutions at lambda = +i and -i (two per interval each).
SurjectivityCertificate trace_surjectivity_certificate(const ProblemSpec& spec,
                                                       const PropagationOptions& opts = {});

/// Random element of the computable subdomain: per interval, a homogeneous
/// solution at one sampled lambda plus a particular solution with a random
/// polynomial forcing at another. Images are exact by construction.
MultiFunction random_multifunction(const ProblemSpec& spec, std::mt19937_64& rng,
                                   const GridOptions& grid = {.max_panel = 0.25, .lambda_scale = 16.0, .extra_breaks = {}},
                                   const PropagationOptions& opts = {});

}  // namespace slmulti
