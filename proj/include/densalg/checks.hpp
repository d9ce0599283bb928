#pragma once

#include "densalg/manifest.hpp"

namespace densalg {

enum class Verdict { pass, fail, error, internal };

const char* verdict_name(Verdict v);

struct CheckResult {
  std::string kind;
  std::string params;   // canonical "key=value ..." string
  Verdict verdict = Verdict::error;
  std::vector<std::string> details;
};

struct Report {
  std::string manifest_name;
  uint64_t seed = 0;
  std::vector<CheckResult> results;

  /// 0 all pass, 1 check failure, 3 internal inconsistency
  int exit_code() const;
  std::string to_text() const;
  std::string to_json() const;
};

/// Executes every check in order. Mathematical failures are verdicts; bad
/// arguments become error verdicts; biconditional disagreements are INTERNAL.
Report run_checks(const Manifest& m, const std::string& manifest_name);

}  // namespace densalg
