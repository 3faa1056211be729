#include "curricula/sync.hpp"

#include <algorithm>
#include <map>

#include "curricula/fs_util.hpp"
#include "curricula/text_util.hpp"
#include "curricula/validator.hpp"

namespace curricula {

std::optional<VersionRange> detect_gap(std::string_view current,
                                       std::string_view latest) {
  auto from = Version::parse(current);
  auto to = Version::parse(latest);
  if (!from || !to) {
    throw std::invalid_argument("unparseable version: " +
                                std::string(!from ? current : latest));
  }
  if (*from >= *to) return std::nullopt;
  return VersionRange{*from, *to};
}

std::string_view to_string(Section s) {
  switch (s) {
    case Section::added: return "added";
    case Section::changed: return "changed";
    case Section::removed: return "removed";
    case Section::fixed: return "fixed";
    case Section::other: return "other";
  }
  return "other";
}

namespace {

std::optional<Version> parse_version_heading(std::string_view line) {
  auto t = trim(line);
  if (t.substr(0, 3) != "## ") return std::nullopt;
  t = trim(t.substr(3));
  if (t.empty() || t.front() != '[') return std::nullopt;
  std::size_t close = t.find(']');
  if (close == std::string_view::npos) return std::nullopt;
  return Version::parse(trim(t.substr(1, close - 1)));
}

std::optional<Section> parse_section_heading(std::string_view line) {
  auto t = trim(line);
  if (t.substr(0, 4) != "### ") return std::nullopt;
  auto name = normalize_phrase(t.substr(4));
  if (name == "added") return Section::added;
  if (name == "changed") return Section::changed;
  if (name == "removed") return Section::removed;
  if (name == "fixed") return Section::fixed;
  return Section::other;
}

}  // namespace

std::vector<ChangelogEntry> triage(std::string_view changelog,
                                   const VersionRange& gap) {
  std::vector<ChangelogEntry> entries;
  std::optional<Version> version;
  Section section = Section::other;
  bool saw_heading = false;

  for (const Line& ln : split_lines(changelog)) {
    if (auto v = parse_version_heading(ln.text)) {
      version = *v;
      section = Section::other;
      saw_heading = true;
      continue;
    }
    if (auto s = parse_section_heading(ln.text)) {
      section = *s;
      continue;
    }
    auto t = trim(ln.text);
    if (t.substr(0, 2) != "- " && t.substr(0, 2) != "* ") continue;
    if (!version || !gap.contains(*version)) continue;
    if (section != Section::added && section != Section::changed &&
        section != Section::removed)
      continue;
    entries.push_back(
        ChangelogEntry{*version, section, std::string(trim(t.substr(2)))});
  }
  if (!saw_heading) {
    throw std::invalid_argument("changelog has no version headings");
  }
  return entries;
}

FeatureMapParseResult parse_feature_map(std::string_view text) {
  FeatureMapParseResult result;
  for (const Line& ln : split_lines(text)) {
    auto t = trim(ln.text);
    if (t.empty() || t.front() == '#') continue;
    std::size_t arrow = t.find("->");
    if (arrow == std::string_view::npos) {
      result.errors.push_back("line " + std::to_string(ln.number) +
                              ": expected 'pattern -> targets'");
      continue;
    }
    FeatureRule rule;
    rule.pattern = std::string(trim(t.substr(0, arrow)));
    if (rule.pattern.empty()) {
      result.errors.push_back("line " + std::to_string(ln.number) +
                              ": empty pattern");
      continue;
    }
    bool ok = true;
    std::string_view targets = t.substr(arrow + 2);
    std::size_t pos = 0;
    while (pos <= targets.size() && ok) {
      std::size_t semi = targets.find(';', pos);
      std::string_view part = (semi == std::string_view::npos)
                                  ? targets.substr(pos)
                                  : targets.substr(pos, semi - pos);
      auto pt = trim(part);
      if (!pt.empty()) {
        std::size_t colon = pt.find(':');
        auto kind = colon == std::string_view::npos
                        ? std::string_view()
                        : trim(pt.substr(0, colon));
        auto values = colon == std::string_view::npos
                          ? std::string_view()
                          : pt.substr(colon + 1);
        if (kind == "modules") {
          std::size_t vp = 0;
          while (vp <= values.size()) {
            std::size_t comma = values.find(',', vp);
            auto vt = trim(comma == std::string_view::npos
                               ? values.substr(vp)
                               : values.substr(vp, comma - vp));
            if (!vt.empty()) {
              bool digits = !vt.empty();
              for (char c : vt)
                if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
              int number = digits ? std::stoi(std::string(vt)) : 0;
              if (!digits || number < 1 || number > kModuleCount) {
                result.errors.push_back("line " + std::to_string(ln.number) +
                                        ": bad module '" + std::string(vt) +
                                        "'");
                ok = false;
                break;
              }
              rule.modules.push_back(number);
            }
            if (comma == std::string_view::npos) break;
            vp = comma + 1;
          }
        } else if (kind == "context") {
          std::size_t vp = 0;
          while (vp <= values.size()) {
            std::size_t comma = values.find(',', vp);
            auto vt = trim(comma == std::string_view::npos
                               ? values.substr(vp)
                               : values.substr(vp, comma - vp));
            if (!vt.empty()) rule.context_files.emplace_back(vt);
            if (comma == std::string_view::npos) break;
            vp = comma + 1;
          }
        } else {
          result.errors.push_back("line " + std::to_string(ln.number) +
                                  ": unknown target kind '" + std::string(pt) +
                                  "'");
          ok = false;
        }
      }
      if (semi == std::string_view::npos) break;
      pos = semi + 1;
    }
    if (ok) result.map.rules.push_back(std::move(rule));
  }
  return result;
}

std::vector<MappedEntry> map_entries(const std::vector<ChangelogEntry>& entries,
                                     const FeatureMap& fmap) {
  std::vector<MappedEntry> out;
  out.reserve(entries.size());
  for (const auto& entry : entries) {
    MappedEntry mapped;
    mapped.entry = entry;
    mapped.unmapped = true;
    for (const auto& rule : fmap.rules) {
      const bool hit =
          rule.pattern == "*" || contains_icase(entry.text, rule.pattern);
      if (!hit) continue;
      mapped.modules = rule.modules;
      mapped.context_files = rule.context_files;
      mapped.unmapped = false;
      break;
    }
    out.push_back(std::move(mapped));
  }
  return out;
}

PayloadParseResult parse_payload(std::string_view text) {
  PayloadParseResult result;
  UpdatePayload payload;
  bool in_header = true;
  bool saw_target = false;
  std::string content;

  for (const Line& ln : split_lines(text)) {
    if (in_header) {
      auto t = trim(ln.text);
      if (t == "---") {
        in_header = false;
        continue;
      }
      if (t.empty() || t.front() == '#') continue;
      std::size_t colon = t.find(':');
      if (colon == std::string_view::npos) {
        result.error = "line " + std::to_string(ln.number) +
                       ": expected 'key: value' header";
        return result;
      }
      auto key = trim(t.substr(0, colon));
      auto value = trim(t.substr(colon + 1));
      if (key == "target") {
        saw_target = true;
        std::size_t slash = value.find('/');
        if (slash == std::string_view::npos) {
          result.error = "bad target '" + std::string(value) + "'";
          return result;
        }
        auto head = trim(value.substr(0, slash));
        auto tail = trim(value.substr(slash + 1));
        if (head == "context") {
          if (tail.empty()) {
            result.error = "bad context target '" + std::string(value) + "'";
            return result;
          }
          payload.context_target = std::string(tail);
        } else {
          auto path = path_from_string(head);
          bool digits = !tail.empty();
          for (char c : tail)
            if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
          if (!path || !digits) {
            result.error = "bad target '" + std::string(value) + "'";
            return result;
          }
          int module = std::stoi(std::string(tail));
          if (module < 1 || module > kModuleCount) {
            result.error = "module out of range in target '" +
                           std::string(value) + "'";
            return result;
          }
          payload.module_target = ModuleTarget{*path, module};
        }
      } else if (key == "source") {
        payload.source_entry = std::string(value);
      } else {
        result.error = "unknown header key '" + std::string(key) + "'";
        return result;
      }
      continue;
    }
    content += std::string(ln.text);
    content += '\n';
  }
  if (!saw_target) {
    result.error = "payload has no target header";
    return result;
  }
  if (in_header) {
    result.error = "payload has no '---' separator";
    return result;
  }
  payload.content = std::move(content);
  result.payload = std::move(payload);
  return result;
}

namespace {

struct StepBlock {
  std::string heading;
  std::vector<std::string> body;
};

std::vector<StepBlock> split_step_blocks(std::string_view content) {
  std::vector<StepBlock> blocks;
  bool any_marker = false;
  for (const Line& ln : split_lines(content)) {
    auto t = trim(ln.text);
    if (t.substr(0, 5) == "Step:") {
      any_marker = true;
      blocks.push_back(StepBlock{std::string(trim(t.substr(5))), {}});
      continue;
    }
    if (!blocks.empty()) blocks.back().body.push_back(std::string(ln.text));
  }
  if (!any_marker) {
    // Single-step form: first non-empty line is the heading.
    StepBlock block;
    bool have_heading = false;
    for (const Line& ln : split_lines(content)) {
      auto t = trim(ln.text);
      if (!have_heading) {
        if (t.empty()) continue;
        block.heading = std::string(t);
        have_heading = true;
        continue;
      }
      block.body.push_back(std::string(ln.text));
    }
    if (have_heading) blocks.push_back(std::move(block));
  }
  for (auto& block : blocks) {
    while (!block.body.empty() && trim(block.body.front()).empty())
      block.body.erase(block.body.begin());
    while (!block.body.empty() && trim(block.body.back()).empty())
      block.body.pop_back();
  }
  return blocks;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

}  // namespace

std::variant<ModuleDoc, ApplyError> apply_update(const ModuleDoc& doc,
                                                 const UpdatePayload& payload) {
  if (!payload.module_target) {
    return ApplyError{ApplyErrorCode::wrong_target,
                      "payload targets a context file, not a module"};
  }
  if (payload.module_target->path != doc.path ||
      payload.module_target->module != doc.number) {
    return ApplyError{
        ApplyErrorCode::wrong_target,
        "payload targets " +
            std::string(to_string(payload.module_target->path)) + "/" +
            std::to_string(payload.module_target->module) + ", doc is " +
            std::string(to_string(doc.path)) + "/" +
            std::to_string(doc.number)};
  }
  if (is_blank(payload.content)) return doc;
  if (!doc.has_checkpoint || doc.checkpoint_offset < 0) {
    return ApplyError{ApplyErrorCode::no_checkpoint,
                      "document has no Checkpoint section"};
  }

  const auto blocks = split_step_blocks(payload.content);
  if (blocks.empty()) return doc;

  const std::string nl =
      doc.raw_text.find("\r\n") != std::string::npos ? "\r\n" : "\n";
  int next_index =
      doc.steps.empty() ? 1 : doc.steps.back().step_index + 1;

  std::string insertion;
  for (const auto& block : blocks) {
    insertion += "## " + std::to_string(doc.number) + "." +
                 std::to_string(next_index) + " " + block.heading + nl + nl;
    ++next_index;
    if (!block.body.empty()) {
      for (const auto& line : block.body) {
        insertion += line;
        insertion += nl;
      }
      insertion += nl;
    }
  }

  const auto offset = static_cast<std::size_t>(doc.checkpoint_offset);
  std::string new_text = doc.raw_text.substr(0, offset);
  new_text += insertion;
  new_text += doc.raw_text.substr(offset);
  return parse_module(new_text, doc.path, doc.number).doc;
}

std::string_view to_string(FileOutcome o) {
  switch (o) {
    case FileOutcome::updated: return "updated";
    case FileOutcome::reverted: return "reverted";
    case FileOutcome::unchanged: return "unchanged";
  }
  return "unchanged";
}

namespace {

// Post-apply verification: structure rules clean, checkpoint retained, STOP
// count not reduced, pre-existing step labels untouched, prefix bytes equal.
std::optional<std::string> verify_update(const ModuleDoc& before,
                                         const ModuleDoc& after) {
  auto violations = validate_structure(after);
  if (!violations.empty()) {
    return "validation failed: " + violations.front().message;
  }
  if (!after.has_checkpoint) return std::string("checkpoint lost");
  if (after.stop_count < before.stop_count) {
    return std::string("STOP block lost");
  }
  if (after.steps.size() < before.steps.size()) {
    return std::string("existing step removed");
  }
  for (std::size_t i = 0; i < before.steps.size(); ++i) {
    const Step& a = before.steps[i];
    const Step& b = after.steps[i];
    if (a.module_number != b.module_number || a.step_index != b.step_index ||
        a.heading != b.heading) {
      return "existing step " + a.label() + " altered";
    }
  }
  if (before.checkpoint_offset >= 0) {
    const auto n = static_cast<std::size_t>(before.checkpoint_offset);
    if (after.raw_text.size() < n ||
        after.raw_text.compare(0, n, before.raw_text, 0, n) != 0) {
      return std::string("prefix bytes changed");
    }
  }
  return std::nullopt;
}

}  // namespace

SyncPlan run_sync(const Corpus& corpus, std::string_view changelog,
                  const FeatureMap& fmap,
                  const std::vector<UpdatePayload>& payloads,
                  const SyncOptions& options) {
  SyncPlan plan;
  plan.from_version = options.current;
  plan.to_version = options.latest;

  auto gap = detect_gap(options.current, options.latest);
  if (!gap) return plan;
  plan.gap = true;
  plan.entries = triage(changelog, *gap);
  plan.targets = map_entries(plan.entries, fmap);

  FileLock lock;
  if (!options.dry_run) {
    FileLock::Status status = FileLock::Status::error;
    lock = FileLock::for_target(corpus.root / ".sync",
                                std::chrono::seconds(10), status);
    if (status != FileLock::Status::acquired) {
      throw SyncLockedError("another sync holds the corpus lock");
    }
  }

  // Module payloads grouped per file, applied in payload order.
  std::map<std::pair<PathId, int>, std::vector<const UpdatePayload*>> by_module;
  std::vector<std::pair<std::string, const UpdatePayload*>> context_updates;
  for (const auto& payload : payloads) {
    if (payload.module_target) {
      const auto& target = *payload.module_target;
      if (options.scope && target.path != *options.scope) {
        plan.applied.push_back(
            AppliedFile{module_rel_path(target.path, target.module),
                        FileOutcome::unchanged, "out of scope"});
        continue;
      }
      by_module[{target.path, target.module}].push_back(&payload);
    } else if (payload.context_target) {
      context_updates.emplace_back(*payload.context_target, &payload);
    }
  }

  for (const auto& [key, group] : by_module) {
    const auto [path, module] = key;
    const std::string rel = module_rel_path(path, module);
    const ModuleDoc* original = corpus.find(path, module);
    if (!original) {
      plan.applied.push_back(
          AppliedFile{rel, FileOutcome::unchanged, "target module not loaded"});
      continue;
    }
    ModuleDoc working = *original;
    std::optional<std::string> failure;
    for (const UpdatePayload* payload : group) {
      auto applied = apply_update(working, *payload);
      if (auto* err = std::get_if<ApplyError>(&applied)) {
        failure = err->message;
        break;
      }
      working = std::move(std::get<ModuleDoc>(applied));
    }
    if (!failure) failure = verify_update(*original, working);
    if (failure) {
      plan.applied.push_back(AppliedFile{rel, FileOutcome::reverted, *failure});
      continue;
    }
    if (working.raw_text == original->raw_text) {
      plan.applied.push_back(AppliedFile{rel, FileOutcome::unchanged, ""});
      continue;
    }
    if (!options.dry_run &&
        !write_file_atomic(corpus.root / rel, serialize(working))) {
      plan.applied.push_back(
          AppliedFile{rel, FileOutcome::reverted, "write failed"});
      continue;
    }
    plan.applied.push_back(AppliedFile{rel, FileOutcome::updated, ""});
  }

  // Context files are replaced whole; the only structural demand is that
  // they stay non-empty.
  std::stable_sort(context_updates.begin(), context_updates.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [name, payload] : context_updates) {
    const std::string rel = "context/" + name;
    if (is_blank(payload->content)) {
      plan.applied.push_back(
          AppliedFile{rel, FileOutcome::reverted, "replacement is empty"});
      continue;
    }
    auto original = read_file_bytes(corpus.root / rel);
    if (original && *original == payload->content) {
      plan.applied.push_back(AppliedFile{rel, FileOutcome::unchanged, ""});
      continue;
    }
    if (!options.dry_run &&
        !write_file_atomic(corpus.root / rel, payload->content)) {
      plan.applied.push_back(
          AppliedFile{rel, FileOutcome::reverted, "write failed"});
      continue;
    }
    plan.applied.push_back(AppliedFile{rel, FileOutcome::updated, ""});
  }
  return plan;
}

std::string render_plan_machine(const SyncPlan& plan) {
  std::string out;
  out += "gap\t" + plan.from_version + "\t" + plan.to_version + "\t" +
         (plan.gap ? "yes" : "no") + "\n";
  for (const auto& entry : plan.entries) {
    out += "entry\t" + entry.version.str() + "\t" +
           std::string(to_string(entry.section)) + "\t" + entry.text + "\n";
  }
  for (const auto& mapped : plan.targets) {
    if (mapped.unmapped) {
      out += "unmapped\t" + mapped.entry.text + "\n";
      continue;
    }
    out += "target\t" + mapped.entry.text + "\tmodules=";
    for (std::size_t i = 0; i < mapped.modules.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(mapped.modules[i]);
    }
    out += "\tcontext=";
    for (std::size_t i = 0; i < mapped.context_files.size(); ++i) {
      if (i) out += ',';
      out += mapped.context_files[i];
    }
    out += '\n';
  }
  std::size_t updated = 0;
  std::size_t reverted = 0;
  std::size_t unchanged = 0;
  for (const auto& file : plan.applied) {
    out += "file\t" + file.file + "\t" + std::string(to_string(file.outcome));
    if (!file.note.empty()) out += "\t" + file.note;
    out += '\n';
    if (file.outcome == FileOutcome::updated) ++updated;
    if (file.outcome == FileOutcome::reverted) ++reverted;
    if (file.outcome == FileOutcome::unchanged) ++unchanged;
  }
  out += "summary\tupdated=" + std::to_string(updated) +
         "\treverted=" + std::to_string(reverted) +
         "\tunchanged=" + std::to_string(unchanged) + "\n";
  return out;
}

std::string render_plan_text(const SyncPlan& plan) {
  std::string out;
  if (!plan.gap) {
    out += "No version gap (" + plan.from_version + " -> " + plan.to_version +
           "); nothing to sync.\n";
    return out;
  }
  out += "Sync " + plan.from_version + " -> " + plan.to_version + ", " +
         std::to_string(plan.entries.size()) + " relevant changelog entries\n";
  for (const auto& mapped : plan.targets) {
    out += "  [" + std::string(to_string(mapped.entry.section)) + "] " +
           mapped.entry.text;
    if (mapped.unmapped) {
      out += "  => UNMAPPED (review manually)";
    } else {
      out += "  => modules";
      for (int m : mapped.modules) out += " " + std::to_string(m);
      if (!mapped.context_files.empty()) {
        out += "; context";
        for (const auto& c : mapped.context_files) out += " " + c;
      }
    }
    out += '\n';
  }
  for (const auto& file : plan.applied) {
    out += std::string(to_string(file.outcome)) + "  " + file.file;
    if (!file.note.empty()) out += "  (" + file.note + ")";
    out += '\n';
  }
  return out;
}

}  // namespace curricula
