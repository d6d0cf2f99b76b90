#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace slmulti {

/// Maximum polynomial degree accepted for a coefficient piece.
inline constexpr std::size_t kMaxDegree = 6;

/// Partition a = a_0 < a_1 < ... < a_m = b of a finite interval.
struct Partition {
  std::vector<double> points;

  std::size_t cells() const { return points.empty() ? 0 : points.size() - 1; }
  double left(std::size_t i) const { return points.at(i); }
  double right(std::size_t i) const { return points.at(i + 1); }
  double length() const { return points.back() - points.front(); }
};

/// Piecewise polynomial on [knots.front(), knots.back()].
///
/// Piece j governs [knots[j], knots[j+1]) and is stored in local form,
/// sum_k pieces[j][k] * (t - knots[j])^k. At interior knots the right piece
/// wins; the right endpoint uses the last piece.
struct PiecewisePoly {
  std::vector<double> knots;
  std::vector<std::vector<double>> pieces;

  static PiecewisePoly constant(double a, double b, double value);
  static PiecewisePoly polynomial(double a, double b, std::vector<double> coeffs);
  /// `before` on [a, jump), `after` on [jump, b].
  static PiecewisePoly step(double a, double b, double jump, double before, double after);

  double operator()(double t) const;
  double left() const { return knots.front(); }
  double right() const { return knots.back(); }
  /// Copy with `shift` added to every piece's constant term.
  PiecewisePoly shifted(double shift) const;
  bool is_piecewise_constant() const;
  /// The same function on [a, b] (within the current span), re-centred so
  /// each piece stays in local form.
  PiecewisePoly restricted(double a, double b) const;
};

/// Polynomial value of the governing piece; throws std::out_of_range outside
/// [f.left(), f.right()].
double eval_piecewise(const PiecewisePoly& f, double t);

/// Coefficients on one partition cell. `r` is 1/p, `Q` the antiderivative of
/// the distributional potential q = Q'. p itself is never formed.
struct IntervalCoefficients {
  PiecewisePoly r;
  PiecewisePoly Q;

  double left() const { return r.left(); }
  double right() const { return r.right(); }
  double length() const { return right() - left(); }
  /// Sorted union of the knots of r and Q.
  std::vector<double> breakpoints() const;
  IntervalCoefficients restricted(double a, double b) const { return {r.restricted(a, b), Q.restricted(a, b)}; }
};

struct ProblemSpec {
  Partition partition;
  std::vector<IntervalCoefficients> coeffs;

  std::size_t intervals() const { return partition.cells(); }
};

struct ValidationReport {
  bool ok = true;
  /// Number of distinct coefficient knots per interval (valid specs only).
  std::vector<std::size_t> knot_counts;
  std::vector<std::string> violations;
};

ValidationReport validate_problem(const ProblemSpec& spec);

/// r = 1, Q = 0 on every cell of the given partition.
ProblemSpec make_free_problem(std::vector<double> points);

}  // namespace slmulti
