#include "slmulti/extensions.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "slmulti/errors.hpp"

namespace slmulti {

namespace {

const cplx kI{0.0, 1.0};

double spectral_norm(const MatX& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<MatX>(M).singularValues()(0);
}

void require_square_even(const MatX& K) {
  if (K.rows() != K.cols() || K.rows() == 0 || K.rows() % 2 != 0) {
    throw std::invalid_argument("boundary parameter K must be 2m x 2m");
  }
}

// [K - I, +/- i (K + I)], the 2m x 4m matrix whose kernel is S.
MatX condition_rows(const MatX& K, Sign sign) {
  const auto n = K.rows();
  const MatX I = MatX::Identity(n, n);
  const cplx s = sign == Sign::Plus ? kI : -kI;
  MatX rows(n, 2 * n);
  rows << K - I, s * (K + I);
  return rows;
}

}  // namespace

std::string to_string(ExtensionKind kind) {
  switch (kind) {
    case ExtensionKind::MaximalDissipative: return "MaximalDissipative";
    case ExtensionKind::MaximalAccumulative: return "MaximalAccumulative";
    case ExtensionKind::SelfAdjoint: return "SelfAdjoint";
    case ExtensionKind::SelfAdjointReal: return "SelfAdjointReal";
    case ExtensionKind::NotClassified: return "NotClassified";
  }
  return "NotClassified";
}

std::string to_string(Sign sign) { return sign == Sign::Plus ? "plus" : "minus"; }

Classification classify_K(const MatX& K, Sign sign, double tol) {
  require_square_even(K);
  const auto n = K.rows();
  Classification c;
  c.norm = spectral_norm(K);
  c.unitarity_defect = spectral_norm(K.adjoint() * K - MatX::Identity(n, n));
  c.symmetry_defect = spectral_norm(K - K.transpose());
  c.is_contraction = c.norm <= 1.0 + tol;
  c.is_unitary = c.unitarity_defect <= tol;
  c.is_symmetric = c.symmetry_defect <= tol;
  if (c.is_unitary) {
    c.kind = c.is_symmetric ? ExtensionKind::SelfAdjointReal : ExtensionKind::SelfAdjoint;
  } else if (c.is_contraction) {
    c.kind = sign == Sign::Plus ? ExtensionKind::MaximalDissipative
                                : ExtensionKind::MaximalAccumulative;
  }
  return c;
}

BoundaryParameter BoundaryParameter::make(MatX K, Sign sign, double tol) {
  BoundaryParameter bp{std::move(K), sign, {}};
  bp.flags = classify_K(bp.K, sign, tol);
  return bp;
}

MatX kappa_from_AB(const MatX& A, const MatX& B, Sign sign) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
    throw std::invalid_argument("kappa_from_AB: A and B must be square of equal size");
  }
  const MatX lhs = sign == Sign::Plus ? MatX(A + kI * B) : MatX(A - kI * B);
  const MatX rhs = sign == Sign::Plus ? MatX(A - kI * B) : MatX(A + kI * B);
  Eigen::FullPivLU<MatX> lu(lhs);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw ValidationError(std::string("kappa_from_AB: A ") + (sign == Sign::Plus ? "+" : "-") +
                          " iB is singular; condition not representable with this sign");
  }
  return -lu.solve(rhs);
}

VecX bc_residual(const BoundaryParameter& bp, const TraceVector& tv) {
  const auto n = bp.K.rows();
  if (tv.gamma1.size() != n || tv.gamma2.size() != n) {
    throw std::invalid_argument("bc_residual: trace vector size does not match K");
  }
  const cplx s = bp.sign == Sign::Plus ? kI : -kI;
  return (bp.K * tv.gamma1 - tv.gamma1) + s * (bp.K * tv.gamma2 + tv.gamma2);
}

MatX boundary_subspace_basis(const MatX& K, Sign sign) {
  require_square_even(K);
  const MatX rows = condition_rows(K, sign);
  Eigen::JacobiSVD<MatX> svd(rows, Eigen::ComputeFullV);
  const auto n = K.rows();
  // rank n for any contraction, so the last n right singular vectors span S.
  return svd.matrixV().rightCols(n);
}

double boundary_subspace_gap(const MatX& K1, const MatX& K2, Sign sign) {
  const MatX S1 = boundary_subspace_basis(K1, sign);
  const MatX S2 = boundary_subspace_basis(K2, sign);
  const MatX residual = S2 - S1 * (S1.adjoint() * S2);
  return spectral_norm(residual);
}

bool conjugation_invariance_test(const MatX& K, int trials, double tol, std::uint64_t seed) {
  require_square_even(K);
  const auto n = K.rows();
  if (spectral_norm(K.adjoint() * K - MatX::Identity(n, n)) > tol) {
    throw std::invalid_argument("conjugation_invariance_test: K is not unitary");
  }
  const MatX rows = condition_rows(K, Sign::Plus);
  const MatX basis = boundary_subspace_basis(K, Sign::Plus);
  const double scale = std::max(1.0, rows.cwiseAbs().maxCoeff());
  auto in_subspace = [&](const VecX& x) {
    return (rows * x.conjugate()).norm() <= 10.0 * tol * scale * std::max(1.0, x.norm());
  };
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    if (!in_subspace(basis.col(j))) return false;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < trials; ++trial) {
    VecX coeffs(basis.cols());
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) coeffs(j) = cplx(normal(rng), normal(rng));
    if (!in_subspace(basis * coeffs)) return false;
  }
  return true;
}

std::pair<MatX, MatX> transmission_conditions(std::size_t intervals) {
  if (intervals == 0) throw std::invalid_argument("transmission_conditions: no intervals");
  const auto n = static_cast<Eigen::Index>(2 * intervals);
  MatX A = MatX::Zero(n, n);
  MatX B = MatX::Zero(n, n);
  B(0, 0) = 1.0;
  B(1, n - 1) = 1.0;
  Eigen::Index row = 2;
  for (std::size_t node = 1; node < intervals; ++node) {
    // Slots 2node-1 and 2node meet at node a_node.
    const auto left = static_cast<Eigen::Index>(2 * node - 1);
    const auto right = left + 1;
    B(row, left) = 1.0;  // y(a-) - y(a+) = 0
    B(row, right) = -1.0;
    ++row;
    A(row, left) = 1.0;  // -D1 y(a-) + D1 y(a+) = 0
    A(row, right) = 1.0;
    ++row;
  }
  return {A, B};
}

}  // namespace slmulti
