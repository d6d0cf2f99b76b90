#pragma once

#include <string>
#include <utility>
#include <vector>

#include "slmulti/types.hpp"

namespace slmulti {

enum class OracleMethod { ClosedForm, TranscendentalRootfind, ExpProduct };

/// Ground-truth spectrum computed without the adaptive integrator or the
/// spectral search.
struct OracleSpectrum {
  std::string tag;
  std::vector<double> eigenvalues;  // ascending
  OracleMethod method = OracleMethod::ClosedForm;
};

/// -y'' = lambda y on [0, L], y(0) = y(L) = 0: lambda_n = (n pi / L)^2.
OracleSpectrum free_dirichlet_spectrum(double L, int n_max);

/// -y'' + alpha delta(t - c) y = lambda y on [0, L] with Dirichlet ends.
/// Eigenvalues are the zeros of
///   s(L) + alpha s(c) s(L - c),  s(x) = sin(sqrt(lambda) x) / sqrt(lambda),
/// bracketed on a fine scan and bisected to machine precision.
OracleSpectrum delta_dirichlet_spectrum(double L, double c, double alpha, int n_max);

/// Ordered product exp(A_n dt_n) ... exp(A_1 dt_1).
Mat2 exp_product_transfer(const std::vector<std::pair<Mat2, double>>& pieces);

}  // namespace slmulti
