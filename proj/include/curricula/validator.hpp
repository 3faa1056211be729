#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "curricula/corpus.hpp"
#include "curricula/persona.hpp"

namespace curricula {

// Closed rule registry. Adding a rule means adding it here, in to_string,
// and in the check that emits it.
enum class RuleId {
  missing_module,
  extra_file,
  empty_context_file,
  h1_mismatch,
  missing_persona,
  persona_mismatch,
  missing_features,
  step_numbering,
  missing_checkpoint,
  parity,
  coverage_gap,
  double_cover,
  persona_regression,
};

constexpr std::array<RuleId, 13> kAllRules = {
    RuleId::missing_module,    RuleId::extra_file,
    RuleId::empty_context_file, RuleId::h1_mismatch,
    RuleId::missing_persona,   RuleId::persona_mismatch,
    RuleId::missing_features,  RuleId::step_numbering,
    RuleId::missing_checkpoint, RuleId::parity,
    RuleId::coverage_gap,      RuleId::double_cover,
    RuleId::persona_regression,
};

std::string_view to_string(RuleId id);
std::optional<RuleId> rule_from_string(std::string_view s);

struct Violation {
  RuleId rule_id;
  std::optional<PathId> path;
  std::optional<int> module;
  std::string message;
  std::optional<std::string> file;
  std::optional<int> line;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<RuleId> checked_rules;
  bool pass = false;
};

struct ValidatorConfig {
  std::set<RuleId> enabled_rules{kAllRules.begin(), kAllRules.end()};
};

// Missing/extra module files and empty context files.
std::vector<Violation> validate_completeness(const Corpus& corpus);

// Per-document checks: H1 number, persona line and its agreement with the
// intermediate schedule, features line, step numbering, checkpoint presence.
std::vector<Violation> validate_structure(const ModuleDoc& doc);

// Feature sets must be identical across the five paths for each module
// number. Comparison is set-based after trimming and case-folding.
std::vector<Violation> validate_parity(const Corpus& corpus);

// Every (level, module) pair covered exactly once, stages never regressing.
std::vector<Violation> validate_schedules(const PersonaSchedule& schedule);

ValidationReport validate_all(const Corpus& corpus,
                              const PersonaSchedule& schedule,
                              const ValidatorConfig& config = {});

// Stable renderings used by the CLI. "machine" is tab-separated, one record
// per line; "text" is for humans. Both end with a pass/fail summary line.
std::string render_report_machine(const ValidationReport& report);
std::string render_report_text(const ValidationReport& report);

}  // namespace curricula
