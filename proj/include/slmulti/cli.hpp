#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "slmulti/spec_io.hpp"

namespace slmulti {

/// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitValidation = 3, kExitNumerical = 4 };

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Green identity, det T = 1, surjectivity rank, and every oracle comparison
/// applicable to the document.
std::vector<PropertyCheck> run_property_suite(const SpecDocument& doc, std::uint64_t seed = 20240601);

/// Entry point of the `slmulti` tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slmulti
