#include "slmulti/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slmulti {

PiecewisePoly PiecewisePoly::constant(double a, double b, double value) {
  return PiecewisePoly{{a, b}, {{value}}};
}

PiecewisePoly PiecewisePoly::polynomial(double a, double b, std::vector<double> coeffs) {
  return PiecewisePoly{{a, b}, {std::move(coeffs)}};
}

PiecewisePoly PiecewisePoly::step(double a, double b, double jump, double before, double after) {
  return PiecewisePoly{{a, jump, b}, {{before}, {after}}};
}

double PiecewisePoly::operator()(double t) const { return eval_piecewise(*this, t); }

PiecewisePoly PiecewisePoly::shifted(double shift) const {
  PiecewisePoly out = *this;
  for (auto& piece : out.pieces) {
    if (piece.empty()) piece.push_back(0.0);
    piece[0] += shift;
  }
  return out;
}

bool PiecewisePoly::is_piecewise_constant() const {
  return std::all_of(pieces.begin(), pieces.end(), [](const auto& piece) {
    return std::all_of(piece.begin() + std::min<std::ptrdiff_t>(1, piece.size()), piece.end(),
                       [](double c) { return c == 0.0; });
  });
}

PiecewisePoly PiecewisePoly::restricted(double a, double b) const {
  if (!(a < b) || a < left() || b > right()) {
    throw std::out_of_range("PiecewisePoly::restricted: [a, b] outside the span");
  }
  PiecewisePoly out;
  out.knots.push_back(a);
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const double lo = knots[j], hi = knots[j + 1];
    if (hi <= a || lo >= b) continue;
    std::vector<double> c = pieces[j];
    const double shift = std::max(lo, a) - lo;
    if (shift != 0.0) {
      // Taylor shift p(x) -> p(x + shift) by repeated synthetic division.
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        for (std::size_t k = c.size() - 1; k > i; --k) c[k - 1] += shift * c[k];
      }
    }
    out.pieces.push_back(std::move(c));
    out.knots.push_back(std::min(hi, b));
  }
  return out;
}

double eval_piecewise(const PiecewisePoly& f, double t) {
  if (f.knots.size() < 2 || f.pieces.size() + 1 != f.knots.size()) {
    throw std::invalid_argument("eval_piecewise: malformed piecewise polynomial");
  }
  if (!(t >= f.knots.front() && t <= f.knots.back())) {
    std::ostringstream msg;
    msg << "eval_piecewise: t = " << t << " outside [" << f.knots.front() << ", "
        << f.knots.back() << "]";
    throw std::out_of_range(msg.str());
  }
  // Right-continuous: first knot strictly greater than t closes the piece.
  auto it = std::upper_bound(f.knots.begin(), f.knots.end(), t);
  std::size_t piece = it == f.knots.end() ? f.pieces.size() - 1
                                          : static_cast<std::size_t>(it - f.knots.begin()) - 1;
  const auto& c = f.pieces[piece];
  const double x = t - f.knots[piece];
  double value = 0.0;
  for (auto k = c.rbegin(); k != c.rend(); ++k) value = value * x + *k;
  return value;
}

std::vector<double> IntervalCoefficients::breakpoints() const {
  std::vector<double> out = r.knots;
  out.insert(out.end(), Q.knots.begin(), Q.knots.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

bool near(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

void check_poly(const PiecewisePoly& f, const char* name, std::size_t cell, double a, double b,
                std::vector<std::string>& out) {
  auto report = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "interval " << cell << ", " << name << ": " << what;
    out.push_back(msg.str());
  };
  if (f.knots.size() < 2) {
    report("fewer than two knots");
    return;
  }
  if (f.pieces.size() + 1 != f.knots.size()) {
    report("piece count does not match knot count");
    return;
  }
  for (std::size_t k = 0; k < f.knots.size(); ++k) {
    if (!std::isfinite(f.knots[k])) report("non-finite knot");
    if (k > 0 && !(f.knots[k] > f.knots[k - 1])) report("knots not strictly increasing");
  }
  if (!near(f.knots.front(), a) || !near(f.knots.back(), b)) {
    report("knot mismatch: knots do not span the partition cell");
  }
  for (const auto& piece : f.pieces) {
    if (piece.empty()) report("empty polynomial piece");
    if (piece.size() > kMaxDegree + 1) report("degree overflow (max 6)");
    for (double c : piece) {
      if (!std::isfinite(c)) report("non-finite coefficient");
    }
  }
}

}  // namespace

ValidationReport validate_problem(const ProblemSpec& spec) {
  ValidationReport report;
  const auto& pts = spec.partition.points;
  if (pts.size() < 2) report.violations.emplace_back("partition needs at least two points");
  bool monotone = true;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!std::isfinite(pts[k])) report.violations.emplace_back("non-finite partition point");
    if (k > 0 && !(pts[k] > pts[k - 1])) monotone = false;
  }
  if (!monotone) report.violations.emplace_back("non-monotone partition");

  if (spec.coeffs.size() != spec.partition.cells()) {
    std::ostringstream msg;
    msg << "expected " << spec.partition.cells() << " interval coefficient sets, got "
        << spec.coeffs.size();
    report.violations.push_back(msg.str());
  } else if (monotone) {
    for (std::size_t i = 0; i < spec.coeffs.size(); ++i) {
      const double a = spec.partition.left(i), b = spec.partition.right(i);
      check_poly(spec.coeffs[i].r, "r", i, a, b, report.violations);
      check_poly(spec.coeffs[i].Q, "Q", i, a, b, report.violations);
    }
  }

  report.ok = report.violations.empty();
  if (report.ok) {
    for (const auto& c : spec.coeffs) report.knot_counts.push_back(c.breakpoints().size());
  }
  return report;
}

ProblemSpec make_free_problem(std::vector<double> points) {
  ProblemSpec spec;
  spec.partition.points = std::move(points);
  for (std::size_t i = 0; i < spec.partition.cells(); ++i) {
    const double a = spec.partition.left(i), b = spec.partition.right(i);
    spec.coeffs.push_back({PiecewisePoly::constant(a, b, 1.0), PiecewisePoly::constant(a, b, 0.0)});
  }
  return spec;
}

}  // namespace slmulti
