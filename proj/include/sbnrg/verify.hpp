#pragma once

#include "sbnrg/config.hpp"
#include "sbnrg/param_map.hpp"

#include <string>
#include <vector>

namespace sbnrg {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool all_passed() const;
};

/// Coupling sets exercised by the oracle suites (several with h > 0).
std::vector<KondoParams> oracle_coupling_sets();

struct VerifyOptions {
  bool sabotage_sign_rule = false; // mutation hook: drop fermionic parity signs
};

/// Oracle equivalence, Hellmann-Feynman and invariant suites at cfg.lambda.
VerifyReport verify(const NRGConfig &cfg, const VerifyOptions &options = {});

} // namespace sbnrg
