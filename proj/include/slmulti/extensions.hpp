#pragma once

#include <cstdint>
#include <string>

#include "slmulti/triplet.hpp"
#include "slmulti/types.hpp"

namespace slmulti {

/// Plus selects L_K: (K - I) G1 y + i (K + I) G2 y = 0 (dissipative family).
/// Minus selects L^K: (K - I) G1 y - i (K + I) G2 y = 0 (accumulative family).
enum class Sign { Plus, Minus };

enum class ExtensionKind {
  MaximalDissipative,
  MaximalAccumulative,
  SelfAdjoint,
  SelfAdjointReal,
  NotClassified,
};

std::string to_string(ExtensionKind kind);
std::string to_string(Sign sign);

struct Classification {
  ExtensionKind kind = ExtensionKind::NotClassified;
  bool is_contraction = false;
  bool is_unitary = false;
  /// K^T == K, transpose without conjugation.
  bool is_symmetric = false;
  double norm = 0.0;               // ||K||_2
  double unitarity_defect = 0.0;   // ||K* K - I||_2
  double symmetry_defect = 0.0;    // ||K - K^T||_2
};

Classification classify_K(const MatX& K, Sign sign, double tol = 1e-10);

struct BoundaryParameter {
  MatX K;
  Sign sign = Sign::Plus;
  Classification flags;

  static BoundaryParameter make(MatX K, Sign sign, double tol = 1e-10);
  std::size_t intervals() const { return static_cast<std::size_t>(K.rows() / 2); }
};

/// K whose condition is equivalent to A G1 y + B G2 y = 0.
/// Plus: K = -(A + iB)^{-1} (A - iB); minus: K = -(A - iB)^{-1} (A + iB).
/// Throws ValidationError when the inverted factor is singular.
MatX kappa_from_AB(const MatX& A, const MatX& B, Sign sign = Sign::Plus);

/// (K - I) gamma1 +/- i (K + I) gamma2.
VecX bc_residual(const BoundaryParameter& bp, const TraceVector& tv);

/// Orthonormal basis (4m x 2m) of S = {(g1, g2) : bc residual vanishes}.
MatX boundary_subspace_basis(const MatX& K, Sign sign);

/// Sine of the largest principal angle between the boundary subspaces.
double boundary_subspace_gap(const MatX& K1, const MatX& K2, Sign sign);

/// Whether componentwise conjugation maps S (sign plus) into itself. Checks
/// every basis vector plus `trials` random combinations. K must be unitary.
bool conjugation_invariance_test(const MatX& K, int trials, double tol = 1e-10,
                                 std::uint64_t seed = 0x5eed);

/// Dirichlet at a_0 and a_m with continuity of y and D1 y across every
/// interior node, as (A, B) rows.
std::pair<MatX, MatX> transmission_conditions(std::size_t intervals);

}  // namespace slmulti
