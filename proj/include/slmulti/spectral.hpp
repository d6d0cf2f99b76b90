#pragma once

#include <cstddef>
#include <vector>

#include "slmulti/coeffs.hpp"
#include "slmulti/extensions.hpp"
#include "slmulti/propagate.hpp"
#include "slmulti/triplet.hpp"

namespace slmulti {

/// Columns are bc residuals of the per-interval basis solutions; M(lambda) is
/// singular exactly at eigenvalues of the extension.
struct CharacteristicMatrix {
  cplx lambda{};
  MatX M;
  /// Sum of the power-of-two column exponents removed before factorization.
  int scale_exp = 0;

  /// det M with columns rescaled by powers of two; the mantissa is returned
  /// and 2^scale_exp restores the true value.
  cplx scaled_determinant() const;
  cplx determinant() const;
};

CharacteristicMatrix characteristic_matrix(const ProblemSpec& spec, const BoundaryParameter& bp,
                                           cplx lambda, const PropagationOptions& opts = {});

struct Eigenpair {
  cplx lambda{};
  int multiplicity = 0;
  /// Kernel vectors of M(lambda): initial traces (y, D1 y)(a_{i-1}+) stacked
  /// per interval.
  std::vector<VecX> coefficients;
  /// Sampled eigenfunctions (unit L2 norm), one per kernel vector, when
  /// requested.
  std::vector<MultiFunction> functions;
};

struct SpectralOptions {
  PropagationOptions propagation;
  /// Roots count as real when |Im| <= real_tol * max(1, |lambda|).
  double real_tol = 1e-8;
  /// Singular values below multiplicity_tol * ||M|| count toward the kernel.
  double multiplicity_tol = 1e-8;
  /// eigenfunction() rejects lambda when sigma_min / sigma_max exceeds this.
  double eigen_threshold = 1e-6;
  std::size_t max_eigs = 0;  // 0 = unlimited
  bool cross_check = true;
  bool compute_functions = false;
  int max_depth = 48;
  GridOptions grid;
};

/// Real eigenvalues of a self-adjoint extension in [lmin, lmax], ascending.
std::vector<Eigenpair> find_eigenvalues_real(const ProblemSpec& spec, const BoundaryParameter& bp,
                                             double lmin, double lmax,
                                             const SpectralOptions& opts = {});

struct Rect {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
};

struct RegionSearch {
  std::vector<Eigenpair> eigenpairs;  // multiplicities are zero orders of det M
  int winding = 0;
  int perturbations = 0;              // contour retries after a zero hit the boundary
};

/// Zeros of det M inside rect via the argument principle and quadrisection.
RegionSearch find_eigenvalues_region(const ProblemSpec& spec, const BoundaryParameter& bp,
                                     const Rect& rect, const SpectralOptions& opts = {});

/// Winding number of det M along the boundary of rect.
int count_eigenvalues(const ProblemSpec& spec, const BoundaryParameter& bp, const Rect& rect,
                      const SpectralOptions& opts = {});

/// Kernel of M(lambda) with sampled eigenfunctions normalized in L2.
Eigenpair eigenfunction(const ProblemSpec& spec, const BoundaryParameter& bp, cplx lambda,
                        const SpectralOptions& opts = {});

/// Propagates per-interval initial traces (stacked in c) with forcing h
/// (empty = homogeneous) on grids from `grid`.
MultiFunction solution_from_coefficients(const ProblemSpec& spec, cplx lambda, const VecX& c,
                                         const std::vector<Forcing>& h, const GridOptions& grid,
                                         const PropagationOptions& opts = {});

/// Sup of |Im(e^{i theta} y)| / sup |y| after the best unimodular rotation.
double realness_defect(const MultiFunction& f);

/// Sum over cells of length * sqrt(max |r|); sets the oscillation scale of
/// det M along the real axis.
double oscillation_length(const ProblemSpec& spec);

}  // namespace slmulti
