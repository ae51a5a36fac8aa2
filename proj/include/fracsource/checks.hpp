#pragma once

#include "fracsource/mittag_leffler.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fracsource::checks {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct CheckOptions {
  /// Mittag-Leffler options used by every check.
  mlf::EvalOptions ml{};
};

/// Options for a named fault ("ml-switch"). Throws std::invalid_argument for
/// unknown names.
CheckOptions inject_fault(const std::string& name);

/// Fast self-checks: Mittag-Leffler closed forms over z in [-100, 0], the
/// alpha = 1 heat limit, the single-mode source closed form and the Duhamel
/// consistency.
std::vector<CheckResult> run_checks(const CheckOptions& opt = {});

/// One "PASS|FAIL name: detail" line per check; returns true if all passed.
bool report(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace fracsource::checks
