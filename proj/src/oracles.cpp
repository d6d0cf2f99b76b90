#include "slmulti/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slmulti/errors.hpp"
#include "slmulti/propagate.hpp"

namespace slmulti {

namespace {

// sin(sqrt(l) x) / sqrt(l), continued through l <= 0.
double sinc_root(double lambda, double x) {
  if (lambda > 0.0) {
    const double k = std::sqrt(lambda);
    return std::sin(k * x) / k;
  }
  if (lambda < 0.0) {
    const double k = std::sqrt(-lambda);
    return std::sinh(k * x) / k;
  }
  return x;
}

}  // namespace

OracleSpectrum free_dirichlet_spectrum(double L, int n_max) {
  if (!(L > 0.0)) throw std::invalid_argument("free_dirichlet_spectrum: L must be positive");
  OracleSpectrum out{"free_dirichlet", {}, OracleMethod::ClosedForm};
  for (int n = 1; n <= n_max; ++n) {
    const double k = n * std::numbers::pi / L;
    out.eigenvalues.push_back(k * k);
  }
  return out;
}

OracleSpectrum delta_dirichlet_spectrum(double L, double c, double alpha, int n_max) {
  if (!(L > 0.0) || !(c > 0.0 && c < L)) {
    throw std::invalid_argument("delta_dirichlet_spectrum: need 0 < c < L");
  }
  OracleSpectrum out{"delta_dirichlet", {}, OracleMethod::TranscendentalRootfind};
  if (n_max <= 0) return out;
  auto G = [&](double lambda) {
    return sinc_root(lambda, L) + alpha * sinc_root(lambda, c) * sinc_root(lambda, L - c);
  };
  // Dirichlet ground state lies above the whole-line bound state -alpha^2/4.
  const double lower = -0.25 * alpha * alpha - 1.0;
  const double dk = std::numbers::pi / (64.0 * L);
  double x0 = lower;
  double g0 = G(x0);
  const double ceiling = std::pow((n_max + 2 + std::abs(alpha)) * std::numbers::pi / L * 4.0, 2);
  while (static_cast<int>(out.eigenvalues.size()) < n_max) {
    const double k = std::sqrt(std::max(x0, 0.0));
    const double x1 = x0 + 2.0 * std::max(k, std::numbers::pi / L) * dk;
    const double g1 = G(x1);
    if (x1 > ceiling) throw NumericalError("delta_dirichlet_spectrum: root bracketing failed");
    if (g0 == 0.0) {
      out.eigenvalues.push_back(x0);
    } else if ((g0 < 0.0) != (g1 < 0.0) && g1 != 0.0) {
      double a = x0, b = x1, ga = g0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double gm = G(mid);
        if (gm == 0.0) {
          a = b = mid;
          break;
        }
        if ((gm < 0.0) == (ga < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      out.eigenvalues.push_back(0.5 * (a + b));
    }
    x0 = x1;
    g0 = g1;
  }
  return out;
}

Mat2 exp_product_transfer(const std::vector<std::pair<Mat2, double>>& pieces) {
  Mat2 T = Mat2::Identity();
  for (const auto& [A, dt] : pieces) T = constant_piece_propagator(A, dt) * T;
  return T;
}

}  // namespace slmulti
