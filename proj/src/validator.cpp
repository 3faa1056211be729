#include "curricula/validator.hpp"

#include <algorithm>
#include <map>

#include "curricula/text_util.hpp"

namespace curricula {
namespace {

constexpr std::array<std::string_view, 13> kRuleNames = {
    "missing_module",    "extra_file",       "empty_context_file",
    "h1_mismatch",       "missing_persona",  "persona_mismatch",
    "missing_features",  "step_numbering",   "missing_checkpoint",
    "parity",            "coverage_gap",     "double_cover",
    "persona_regression",
};

Violation make(RuleId id, std::optional<PathId> path, std::optional<int> module,
               std::string message, std::optional<std::string> file = {},
               std::optional<int> line = {}) {
  return Violation{id, path, module, std::move(message), std::move(file), line};
}

}  // namespace

std::string_view to_string(RuleId id) {
  return kRuleNames[static_cast<std::size_t>(id)];
}

std::optional<RuleId> rule_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (s == kRuleNames[i]) return static_cast<RuleId>(i);
  }
  return std::nullopt;
}

std::vector<Violation> validate_completeness(const Corpus& corpus) {
  std::vector<Violation> out;
  for (PathId path : kAllPaths) {
    for (int number = 1; number <= kModuleCount; ++number) {
      if (!corpus.find(path, number)) {
        out.push_back(make(RuleId::missing_module, path, number,
                           "missing module file " + module_rel_path(path, number)));
      }
    }
  }
  for (const auto& rel : corpus.extra_files) {
    out.push_back(make(RuleId::extra_file, std::nullopt, std::nullopt,
                       "unexpected file " + rel, rel));
  }
  for (const auto& [name, size] : corpus.context_files) {
    if (size == 0) {
      out.push_back(make(RuleId::empty_context_file, std::nullopt, std::nullopt,
                         "empty context file context/" + name,
                         "context/" + name));
    }
  }
  return out;
}

std::vector<Violation> validate_structure(const ModuleDoc& doc) {
  std::vector<Violation> out;
  const std::string rel = module_rel_path(doc.path, doc.number);
  auto at = [&](int line) -> std::optional<int> {
    return line > 0 ? std::optional<int>(line) : std::nullopt;
  };

  if (!doc.h1_number.has_value()) {
    out.push_back(make(RuleId::h1_mismatch, doc.path, doc.number,
                       "missing or malformed H1 in " + rel, rel, at(doc.h1_line)));
  } else if (*doc.h1_number != doc.number) {
    out.push_back(make(RuleId::h1_mismatch, doc.path, doc.number,
                       "H1 says module " + std::to_string(*doc.h1_number) +
                           " but file is module " + std::to_string(doc.number),
                       rel, at(doc.h1_line)));
  }

  if (!doc.persona.has_value()) {
    out.push_back(make(RuleId::missing_persona, doc.path, doc.number,
                       doc.persona_line > 0
                           ? "unrecognized persona line in " + rel
                           : "missing persona line in " + rel,
                       rel, at(doc.persona_line)));
  } else {
    const Persona expected = persona_for(builtin_schedule(),
                                         ExperienceLevel::intermediate,
                                         doc.number);
    if (*doc.persona != expected) {
      out.push_back(make(RuleId::persona_mismatch, doc.path, doc.number,
                         "persona " + std::string(to_string(*doc.persona)) +
                             " does not match default " +
                             std::string(to_string(expected)) + " for module " +
                             std::to_string(doc.number),
                         rel, at(doc.persona_line)));
    }
  }

  if (!doc.features.has_value()) {
    out.push_back(make(RuleId::missing_features, doc.path, doc.number,
                       "missing CC features line in " + rel, rel));
  }

  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    const Step& st = doc.steps[i];
    if (st.module_number != doc.number) {
      out.push_back(make(RuleId::step_numbering, doc.path, doc.number,
                         "step label " + st.label() + " does not match module " +
                             std::to_string(doc.number),
                         rel, at(st.line)));
    } else if (st.step_index != static_cast<int>(i) + 1) {
      out.push_back(make(RuleId::step_numbering, doc.path, doc.number,
                         "non-contiguous step numbering at " + st.label(), rel,
                         at(st.line)));
    }
  }

  if (!doc.has_checkpoint) {
    out.push_back(make(RuleId::missing_checkpoint, doc.path, doc.number,
                       "missing Checkpoint section in " + rel, rel));
  }
  return out;
}

std::vector<Violation> validate_parity(const Corpus& corpus) {
  std::vector<Violation> out;
  for (int number = 1; number <= kModuleCount; ++number) {
    // normalized feature -> paths that teach it; only paths whose module
    // parsed with a features line participate.
    std::map<std::string, std::set<PathId>> have;
    std::set<PathId> participating;
    for (PathId path : kAllPaths) {
      const ModuleDoc* doc = corpus.find(path, number);
      if (!doc || !doc->features.has_value()) continue;
      participating.insert(path);
      for (const auto& feature : *doc->features) {
        have[normalize_phrase(feature)].insert(path);
      }
    }
    if (participating.size() < 2) continue;
    for (const auto& [feature, paths] : have) {
      if (paths.size() == participating.size()) continue;
      std::string missing;
      for (PathId p : participating) {
        if (paths.count(p)) continue;
        if (!missing.empty()) missing += ",";
        missing += std::string(to_string(p));
      }
      out.push_back(make(RuleId::parity, std::nullopt, number,
                         "feature \"" + feature + "\" in module " +
                             std::to_string(number) + " missing in " + missing));
    }
  }
  return out;
}

std::vector<Violation> validate_schedules(const PersonaSchedule& schedule) {
  std::vector<Violation> out;
  for (ExperienceLevel level : kAllLevels) {
    auto it = schedule.table.find(level);
    const std::string level_name(to_string(level));
    if (it == schedule.table.end()) {
      for (int m = 1; m <= kModuleCount; ++m) {
        out.push_back(make(RuleId::coverage_gap, std::nullopt, m,
                           "no persona covers module " + std::to_string(m) +
                               " for " + level_name));
      }
      continue;
    }
    const auto& ranges = it->second;
    std::array<int, kModuleCount + 1> cover{};
    std::array<int, kModuleCount + 1> stage{};
    stage.fill(-1);
    for (Persona p : kAllPersonas) {
      const StageRange& r = ranges[static_cast<std::size_t>(p)];
      for (int m = 1; m <= kModuleCount; ++m) {
        if (!r.contains(m)) continue;
        ++cover[m];
        if (stage[m] < 0) stage[m] = stage_order(p);
      }
    }
    for (int m = 1; m <= kModuleCount; ++m) {
      if (cover[m] == 0) {
        out.push_back(make(RuleId::coverage_gap, std::nullopt, m,
                           "no persona covers module " + std::to_string(m) +
                               " for " + level_name));
      } else if (cover[m] > 1) {
        out.push_back(make(RuleId::double_cover, std::nullopt, m,
                           "module " + std::to_string(m) + " covered " +
                               std::to_string(cover[m]) + " times for " +
                               level_name));
      }
    }
    for (int m = 2; m <= kModuleCount; ++m) {
      if (stage[m] < 0 || stage[m - 1] < 0) continue;
      if (stage[m] < stage[m - 1]) {
        out.push_back(make(
            RuleId::persona_regression, std::nullopt, m,
            "stage regresses from module " + std::to_string(m - 1) + " to " +
                std::to_string(m) + " for " + level_name));
      }
    }
  }
  return out;
}

ValidationReport validate_all(const Corpus& corpus,
                              const PersonaSchedule& schedule,
                              const ValidatorConfig& config) {
  std::vector<Violation> all = validate_completeness(corpus);
  for (const auto& [key, doc] : corpus.modules) {
    auto vs = validate_structure(doc);
    all.insert(all.end(), vs.begin(), vs.end());
  }
  {
    auto vs = validate_parity(corpus);
    all.insert(all.end(), vs.begin(), vs.end());
    vs = validate_schedules(schedule);
    all.insert(all.end(), vs.begin(), vs.end());
  }

  ValidationReport report;
  for (auto& v : all) {
    if (config.enabled_rules.count(v.rule_id)) {
      report.violations.push_back(std::move(v));
    }
  }
  auto key = [](const Violation& v) {
    return std::make_tuple(
        std::string(to_string(v.rule_id)),
        v.path ? std::string(to_string(*v.path)) : std::string(),
        v.module.value_or(0), v.message,
        v.file.value_or(std::string()), v.line.value_or(0));
  };
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [&](const Violation& a, const Violation& b) {
                     return key(a) < key(b);
                   });
  report.checked_rules.assign(config.enabled_rules.begin(),
                              config.enabled_rules.end());
  report.pass = report.violations.empty();
  return report;
}

namespace {

std::string violation_line_machine(const Violation& v) {
  std::string out = "violation\t";
  out += std::string(to_string(v.rule_id));
  out += '\t';
  out += v.path ? std::string(to_string(*v.path)) : "-";
  out += '\t';
  out += v.module ? std::to_string(*v.module) : "-";
  out += '\t';
  out += v.file ? *v.file : "-";
  out += '\t';
  out += v.line ? std::to_string(*v.line) : "-";
  out += '\t';
  out += v.message;
  return out;
}

}  // namespace

std::string render_report_machine(const ValidationReport& report) {
  std::string out;
  for (RuleId id : report.checked_rules) {
    out += "checked\t";
    out += std::string(to_string(id));
    out += '\n';
  }
  for (const auto& v : report.violations) {
    out += violation_line_machine(v);
    out += '\n';
  }
  out += report.pass ? "result\tpass\n" : "result\tfail\n";
  return out;
}

std::string render_report_text(const ValidationReport& report) {
  std::string out;
  for (const auto& v : report.violations) {
    out += std::string(to_string(v.rule_id));
    out += ": ";
    out += v.message;
    if (v.file) {
      out += " [";
      out += *v.file;
      if (v.line) {
        out += ':';
        out += std::to_string(*v.line);
      }
      out += ']';
    }
    out += '\n';
  }
  out += report.pass ? "PASS" : "FAIL";
  out += " (";
  out += std::to_string(report.violations.size());
  out += " violation";
  if (report.violations.size() != 1) out += 's';
  out += ", ";
  out += std::to_string(report.checked_rules.size());
  out += " rules checked)\n";
  return out;
}

}  // namespace curricula
