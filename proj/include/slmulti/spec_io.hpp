#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "slmulti/coeffs.hpp"
#include "slmulti/extensions.hpp"

namespace slmulti {

/// JSON problem document:
///   {"partition": [...],
///    "intervals": [{"r": {"knots": [...], "coeffs": [[...], ...]},
///                   "Q": {...}}, ...],
///    "K": {"re": [[...]], "im": [[...]]},
///    "sign": "plus" | "minus",
///    "k_family": {"type": "constant"}}          (optional)
struct SpecDocument {
  ProblemSpec problem;
  MatX K;
  Sign sign = Sign::Plus;
  std::optional<std::string> k_family;

  BoundaryParameter boundary(double tol = 1e-10) const { return BoundaryParameter::make(K, sign, tol); }
};

/// Throws ValidationError; syntax errors carry line and column.
SpecDocument parse_spec_document(std::string_view text);
SpecDocument load_spec_document(const std::filesystem::path& path);

/// Deterministic JSON with every number printed as %.17g.
std::string dump_spec_document(const SpecDocument& doc);

/// %.17g
std::string format_number(double x);

}  // namespace slmulti
