#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slmulti/errors.hpp"
#include "slmulti/extensions.hpp"
#include "slmulti/triplet.hpp"
#include "support.hpp"

using namespace slmulti;
using std::numbers::pi;

namespace {

MatX J2() {
  MatX K(2, 2);
  K << 0.0, 1.0, -1.0, 0.0;
  return K;
}

TraceVector random_trace(std::mt19937_64& rng, Eigen::Index n) {
  TraceVector tv{VecX(n), VecX(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    tv.gamma1(k) = testing::random_complex(rng);
    tv.gamma2(k) = testing::random_complex(rng);
  }
  return tv;
}

}  // namespace

TEST_CASE("classification examples") {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    CHECK(classify_K(MatX::Identity(2, 2), s).kind == ExtensionKind::SelfAdjointReal);
    CHECK(classify_K(MatX::Identity(4, 4), s).kind == ExtensionKind::SelfAdjointReal);
  }
  const auto zero = classify_K(MatX::Zero(2, 2), Sign::Plus);
  CHECK(zero.kind == ExtensionKind::MaximalDissipative);
  CHECK(zero.is_contraction);
  CHECK_FALSE(zero.is_unitary);
  CHECK(classify_K(MatX::Zero(2, 2), Sign::Minus).kind == ExtensionKind::MaximalAccumulative);

  const auto j = classify_K(J2(), Sign::Plus);
  CHECK(j.kind == ExtensionKind::SelfAdjoint);
  CHECK(j.is_unitary);
  CHECK_FALSE(j.is_symmetric);
  CHECK(j.symmetry_defect == doctest::Approx(2.0));

  const auto two = classify_K(2.0 * MatX::Identity(2, 2), Sign::Plus);
  CHECK(two.kind == ExtensionKind::NotClassified);
  CHECK(two.norm == doctest::Approx(2.0));
  CHECK_FALSE(two.is_contraction);
}

TEST_CASE("classification errors and tolerance") {
  CHECK_THROWS(classify_K(MatX::Identity(3, 3), Sign::Plus));
  CHECK_THROWS(classify_K(MatX::Identity(2, 4), Sign::Plus));
  CHECK_THROWS(classify_K(MatX(0, 0), Sign::Plus));
  const MatX almost = (1.0 + 1e-12) * MatX::Identity(2, 2);
  CHECK(classify_K(almost, Sign::Plus).kind == ExtensionKind::SelfAdjointReal);
  CHECK(classify_K(almost, Sign::Plus, 1e-14).kind == ExtensionKind::NotClassified);
}

TEST_CASE("property: flag invariants on random matrices") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 * (1 + trial % 3);
    MatX K;
    switch (trial % 4) {
      case 0: K = testing::random_unitary(rng, n); break;
      case 1: K = testing::random_symmetric_unitary(rng, n); break;
      case 2: K = testing::random_contraction(rng, n, 0.9); break;
      default: K = testing::random_contraction(rng, n, 1.3); break;
    }
    const Sign sign = trial % 2 ? Sign::Minus : Sign::Plus;
    const auto c = classify_K(K, sign);
    CHECK(c.is_contraction == (c.norm <= 1.0 + 1e-10));
    if (c.kind == ExtensionKind::SelfAdjointReal) CHECK((c.is_unitary && c.is_symmetric));
    if (c.kind == ExtensionKind::SelfAdjoint) CHECK((c.is_unitary && !c.is_symmetric));
    if (c.is_unitary) CHECK(c.is_contraction);
    switch (trial % 4) {
      case 0: CHECK(c.kind == ExtensionKind::SelfAdjoint); break;
      case 1: CHECK(c.kind == ExtensionKind::SelfAdjointReal); break;
      case 2:
        CHECK(c.kind == (sign == Sign::Plus ? ExtensionKind::MaximalDissipative : ExtensionKind::MaximalAccumulative));
        break;
      default: CHECK(c.kind == ExtensionKind::NotClassified); break;
    }
  }
}

TEST_CASE("kappa_from_AB examples") {
  const MatX I = MatX::Identity(2, 2), Z = MatX::Zero(2, 2);
  CHECK(testing::max_abs(kappa_from_AB(Z, I) - I) < 1e-15);
  CHECK(testing::max_abs(kappa_from_AB(I, Z) + I) < 1e-15);
  CHECK(testing::max_abs(kappa_from_AB(Z, I, Sign::Minus) - I) < 1e-15);

  const auto [A, B] = transmission_conditions(2);
  MatX A_expect = MatX::Zero(4, 4), B_expect = MatX::Zero(4, 4);
  B_expect(0, 0) = 1;
  B_expect(1, 3) = 1;
  B_expect(2, 1) = 1;
  B_expect(2, 2) = -1;
  A_expect(3, 1) = 1;
  A_expect(3, 2) = 1;
  CHECK(A == A_expect);
  CHECK(B == B_expect);
  const MatX K = kappa_from_AB(A, B);
  const auto c = classify_K(K, Sign::Plus);
  CHECK(c.is_unitary);
  CHECK(c.kind == ExtensionKind::SelfAdjointReal);
}

TEST_CASE("kappa_from_AB rejects singular A + iB") {
  const MatX Z = MatX::Zero(2, 2);
  CHECK_THROWS_AS(kappa_from_AB(Z, Z), ValidationError);
  // A = iB... A + iB = 2iB is fine for plus but A - iB = 0 breaks minus.
  const MatX B = MatX::Identity(2, 2);
  const MatX A = cplx(0, 1) * B;
  CHECK_NOTHROW(kappa_from_AB(A, B, Sign::Plus));
  CHECK_THROWS_AS(kappa_from_AB(A, B, Sign::Minus), ValidationError);
}

TEST_CASE("property: Cayley round trip") {
  std::mt19937_64 rng(52);
  for (Sign sign : {Sign::Plus, Sign::Minus}) {
    for (int example = 0; example < 6; ++example) {
      const Eigen::Index n = 2 * (1 + example % 3);
      const MatX A = testing::random_matrix(rng, n), B = testing::random_matrix(rng, n);
      const auto bp = BoundaryParameter::make(kappa_from_AB(A, B, sign), sign, 1e300);
      // Traces inside {A g1 + B g2 = 0}: g1 = -A^{-1} B g2 when A is invertible.
      for (int k = 0; k < 100; ++k) {
        TraceVector tv = random_trace(rng, n);
        const bool member = k % 2 == 0;
        if (member) tv.gamma1 = -A.fullPivLu().solve(B * tv.gamma2);
        const double ab = (A * tv.gamma1 + B * tv.gamma2).norm();
        const double res = bc_residual(bp, tv).norm();
        const double scale = tv.gamma1.norm() + tv.gamma2.norm();
        if (member) {
          CHECK(res <= 1e-9 * scale * std::max(1.0, testing::max_abs(bp.K)));
        } else {
          CHECK(ab > 1e-6 * scale);
          CHECK(res > 1e-9 * scale);
        }
      }
    }
  }
}

TEST_CASE("bc residual examples") {
  const auto dir = BoundaryParameter::make(MatX::Identity(2, 2), Sign::Plus);
  const auto neu = BoundaryParameter::make(-MatX::Identity(2, 2), Sign::Plus);
  TraceVector tv{VecX(2), VecX::Zero(2)};
  tv.gamma1 << 1.0, 1.0;  // sin t on [0, pi]
  CHECK(bc_residual(dir, tv).norm() == 0.0);
  CHECK(bc_residual(neu, TraceVector{VecX::Zero(2), VecX::Ones(2)}).norm() == 0.0);
  // cos t on [0, pi]: gamma1 = (0, 0), gamma2 = (1, -1).
  TraceVector cos_tv{VecX::Zero(2), VecX(2)};
  cos_tv.gamma2 << 1.0, -1.0;
  CHECK(bc_residual(dir, cos_tv).norm() > 1.0);

  TraceVector tv_sign{VecX::Ones(2), VecX::Ones(2)};
  const auto zp = BoundaryParameter::make(MatX::Zero(2, 2), Sign::Plus);
  const auto zm = BoundaryParameter::make(MatX::Zero(2, 2), Sign::Minus);
  CHECK(std::abs(bc_residual(zp, tv_sign)(0) - cplx(-1, 1)) < 1e-15);
  CHECK(std::abs(bc_residual(zm, tv_sign)(0) - cplx(-1, -1)) < 1e-15);
  CHECK_THROWS(bc_residual(dir, TraceVector{VecX::Zero(4), VecX::Zero(4)}));
}

TEST_CASE("conjugation invariance examples") {
  CHECK(conjugation_invariance_test(MatX::Identity(2, 2), 20));
  CHECK_FALSE(conjugation_invariance_test(J2(), 20));
  std::mt19937_64 rng(53);
  CHECK(conjugation_invariance_test(testing::random_symmetric_unitary(rng, 4), 20));
  CHECK_THROWS_AS(conjugation_invariance_test(MatX::Zero(2, 2), 5), std::invalid_argument);
}

TEST_CASE("property: conjugation invariance equals symmetry for unitary K") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = trial % 2 ? 4 : 2;
    const MatX K = trial % 3 == 0 ? testing::random_symmetric_unitary(rng, n) : testing::random_unitary(rng, n);
    const bool symmetric = testing::max_abs(K - K.transpose()) <= 1e-10;
    CHECK(conjugation_invariance_test(K, 10) == symmetric);
  }
}

TEST_CASE("boundary subspaces") {
  std::mt19937_64 rng(55);
  SUBCASE("basis spans the kernel of the condition") {
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      const MatX K = testing::random_contraction(rng, 4, 0.7);
      const MatX S = boundary_subspace_basis(K, sign);
      REQUIRE(S.rows() == 8);
      REQUIRE(S.cols() == 4);
      const auto bp = BoundaryParameter::make(K, sign);
      for (Eigen::Index j = 0; j < 4; ++j) {
        const TraceVector tv{S.col(j).head(4), S.col(j).tail(4)};
        CHECK(bc_residual(bp, tv).norm() < 1e-12);
      }
      CHECK(testing::max_abs(S.adjoint() * S - MatX::Identity(4, 4)) < 1e-12);
    }
  }
  SUBCASE("distinct unitary parameters give distinct subspaces") {
    for (int trial = 0; trial < 30; ++trial) {
      const MatX K1 = testing::random_unitary(rng, 4);
      const MatX K2 = trial % 2 ? testing::random_unitary(rng, 4) : MatX(K1 * std::polar(1.0, 1e-4));
      CHECK(boundary_subspace_gap(K1, K2, Sign::Plus) > 0.0);
      CHECK(boundary_subspace_gap(K1, K1, Sign::Plus) < 1e-12);
    }
  }
}
