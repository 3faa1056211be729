#include "curricula/session_state.hpp"

#include <json.hpp>

#include "curricula/fs_util.hpp"
#include "curricula/text_util.hpp"
#include "curricula/version.hpp"

namespace curricula {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 11> kStageNames = {
    "version_check",   "project_selection", "curriculum_upgrade",
    "os_detection",    "language_selection", "experience_level",
    "progress_resume", "env_verification",  "scaffolding",
    "module1_delivery", "complete",
};

bool language_skipped(const Answers& answers) {
  return answers.project == PathId::canvas || answers.project == PathId::byop;
}

}  // namespace

std::string_view to_string(Stage s) {
  return kStageNames[static_cast<std::size_t>(s)];
}

std::optional<Stage> stage_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (s == kStageNames[i]) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

std::string_view expected_input_name(Stage s) {
  switch (s) {
    case Stage::version_check: return "current and latest version strings";
    case Stage::project_selection: return "a project path id";
    case Stage::curriculum_upgrade: return "an acknowledgement";
    case Stage::os_detection: return "an operating system name";
    case Stage::language_selection: return "a language name";
    case Stage::experience_level: return "an experience level";
    case Stage::progress_resume: return "a resume-or-restart choice";
    case Stage::env_verification: return "an acknowledgement";
    case Stage::scaffolding: return "an acknowledgement";
    case Stage::module1_delivery: return "an acknowledgement";
    case Stage::complete: return "nothing (onboarding is complete)";
  }
  return "";
}

OnboardingState advance(const OnboardingState& state, const AdvanceInput& input,
                        const AdvanceContext& ctx, std::string now_iso) {
  if (state.stage == Stage::complete) {
    throw StateError("cannot advance: onboarding is complete");
  }
  auto wrong_input = [&]() -> StateError {
    return StateError("stage " + std::string(to_string(state.stage)) +
                      " expects " + std::string(expected_input_name(state.stage)));
  };

  OnboardingState next = state;
  switch (state.stage) {
    case Stage::version_check: {
      const auto* answer = std::get_if<VersionCheckAnswer>(&input);
      if (!answer) throw wrong_input();
      auto current = Version::parse(answer->current);
      auto latest = Version::parse(answer->latest);
      if (!current || !latest) {
        throw StateError("unparseable version string");
      }
      next.answers.curriculum_version = answer->current;
      next.answers.latest_version = answer->latest;
      next.version_gap = *current < *latest;
      next.stage = Stage::project_selection;
      break;
    }
    case Stage::project_selection: {
      const auto* project = std::get_if<PathId>(&input);
      if (!project) throw wrong_input();
      next.answers.project = *project;
      next.stage = next.version_gap ? Stage::curriculum_upgrade
                                    : Stage::os_detection;
      break;
    }
    case Stage::curriculum_upgrade: {
      if (!std::holds_alternative<Ack>(input)) throw wrong_input();
      next.stage = Stage::os_detection;
      break;
    }
    case Stage::os_detection: {
      const auto* os = std::get_if<std::string>(&input);
      if (!os) throw wrong_input();
      next.answers.os = *os;
      next.stage = language_skipped(next.answers) ? Stage::experience_level
                                                  : Stage::language_selection;
      break;
    }
    case Stage::language_selection: {
      const auto* language = std::get_if<std::string>(&input);
      if (!language) throw wrong_input();
      next.answers.language = *language;
      next.stage = Stage::experience_level;
      break;
    }
    case Stage::experience_level: {
      const auto* level = std::get_if<ExperienceLevel>(&input);
      if (!level) throw wrong_input();
      next.answers.experience = *level;
      next.stage = ctx.markers_exist ? Stage::progress_resume
                                     : Stage::env_verification;
      break;
    }
    case Stage::progress_resume: {
      if (!std::holds_alternative<ResumeChoice>(input)) throw wrong_input();
      next.stage = Stage::env_verification;
      break;
    }
    case Stage::env_verification: {
      if (!std::holds_alternative<Ack>(input)) throw wrong_input();
      next.stage = Stage::scaffolding;
      break;
    }
    case Stage::scaffolding: {
      if (!std::holds_alternative<Ack>(input)) throw wrong_input();
      next.stage = Stage::module1_delivery;
      break;
    }
    case Stage::module1_delivery: {
      if (!std::holds_alternative<Ack>(input)) throw wrong_input();
      next.stage = Stage::complete;
      break;
    }
    case Stage::complete:
      break;  // unreachable
  }
  next.updated_at = now_iso.empty() ? iso8601_now() : std::move(now_iso);
  return next;
}

std::string state_to_json(const OnboardingState& state) {
  json answers = json::object();
  if (state.answers.project)
    answers["project"] = std::string(to_string(*state.answers.project));
  if (state.answers.language) answers["language"] = *state.answers.language;
  if (state.answers.experience)
    answers["experience"] = std::string(to_string(*state.answers.experience));
  if (state.answers.os) answers["os"] = *state.answers.os;
  if (state.answers.curriculum_version)
    answers["curriculum_version"] = *state.answers.curriculum_version;
  if (state.answers.latest_version)
    answers["latest_version"] = *state.answers.latest_version;
  json obj = {
      {"schema_version", state.schema_version},
      {"stage", std::string(to_string(state.stage))},
      {"answers", answers},
      {"version_gap", state.version_gap},
      {"updated_at", state.updated_at},
  };
  return obj.dump(2) + "\n";
}

std::optional<OnboardingState> state_from_json(std::string_view text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
  OnboardingState state;
  try {
    if (!obj.contains("schema_version") ||
        obj["schema_version"].get<int>() != 1)
      return std::nullopt;
    auto stage = stage_from_string(obj.value("stage", ""));
    if (!stage) return std::nullopt;
    state.stage = *stage;
    state.version_gap = obj.value("version_gap", false);
    state.updated_at = obj.value("updated_at", "");
    if (obj.contains("answers") && obj["answers"].is_object()) {
      const json& a = obj["answers"];
      if (a.contains("project")) {
        auto p = path_from_string(a["project"].get<std::string>());
        if (!p) return std::nullopt;
        state.answers.project = *p;
      }
      if (a.contains("language"))
        state.answers.language = a["language"].get<std::string>();
      if (a.contains("experience")) {
        auto lvl = level_from_string(a["experience"].get<std::string>());
        if (!lvl) return std::nullopt;
        state.answers.experience = *lvl;
      }
      if (a.contains("os")) state.answers.os = a["os"].get<std::string>();
      if (a.contains("curriculum_version"))
        state.answers.curriculum_version =
            a["curriculum_version"].get<std::string>();
      if (a.contains("latest_version"))
        state.answers.latest_version = a["latest_version"].get<std::string>();
    }
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return state;
}

std::optional<OnboardingState> load_state(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  if (!bytes) return std::nullopt;
  return state_from_json(*bytes);
}

bool save_state(const std::filesystem::path& path,
                const OnboardingState& state) {
  return write_file_atomic(path, state_to_json(state));
}

std::string_view to_string(ResumeStatus s) {
  switch (s) {
    case ResumeStatus::fresh: return "fresh";
    case ResumeStatus::resume_valid: return "resume_valid";
    case ResumeStatus::resume_conflict: return "resume_conflict";
  }
  return "fresh";
}

ResumeStatus resume_check(const OnboardingState& state,
                          const std::optional<SessionMarkers>& markers) {
  if (!markers) return ResumeStatus::fresh;
  if (markers->project && state.answers.project &&
      *markers->project != *state.answers.project) {
    return ResumeStatus::resume_conflict;
  }
  if (state.answers.experience &&
      markers->effective_level.declared != *state.answers.experience) {
    return ResumeStatus::resume_conflict;
  }
  return ResumeStatus::resume_valid;
}

std::string render_markers_region(const SessionMarkers& markers) {
  std::string out;
  out += kMarkersBegin;
  out += '\n';
  if (markers.project) {
    out += "Project: ";
    out += std::string(to_string(*markers.project));
    out += '\n';
  }
  out += "Declared Level: ";
  out += std::string(to_string(markers.effective_level.declared));
  out += '\n';
  out += "Effective Level: ";
  out += std::string(to_string(markers.effective_level.current));
  out += '\n';
  out += "Current Module: " + std::to_string(markers.current_module) + "\n";
  if (markers.current_step) {
    out += "Current Step: " + std::to_string(markers.current_step->first) +
           "." + std::to_string(markers.current_step->second) + "\n";
  }
  out += "Completed Steps:";
  for (const auto& [module, step] : markers.completed_steps) {
    out += " " + std::to_string(module) + "." + std::to_string(step);
  }
  out += '\n';
  out += kMarkersEnd;
  out += '\n';
  return out;
}

namespace {

std::optional<std::pair<int, int>> parse_step_ref(std::string_view s) {
  auto t = trim(s);
  std::size_t dot = t.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  auto num = [](std::string_view piece) -> std::optional<int> {
    auto p = trim(piece);
    if (p.empty()) return std::nullopt;
    for (char c : p)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    return std::stoi(std::string(p));
  };
  auto module = num(t.substr(0, dot));
  auto step = num(t.substr(dot + 1));
  if (!module || !step) return std::nullopt;
  return std::make_pair(*module, *step);
}

struct RegionSpan {
  std::size_t begin = std::string_view::npos;  // offset of begin marker
  std::size_t end = std::string_view::npos;    // offset past end marker line
};

std::optional<RegionSpan> find_region(std::string_view text) {
  const std::size_t begin = text.find(kMarkersBegin);
  if (begin == std::string_view::npos) return std::nullopt;
  std::size_t end = text.find(kMarkersEnd, begin);
  if (end == std::string_view::npos) return std::nullopt;
  end += kMarkersEnd.size();
  if (end < text.size() && text[end] == '\r') ++end;
  if (end < text.size() && text[end] == '\n') ++end;
  return RegionSpan{begin, end};
}

}  // namespace

std::optional<SessionMarkers> parse_markers(std::string_view file_text) {
  auto span = find_region(file_text);
  if (!span) return std::nullopt;
  std::string_view region =
      file_text.substr(span->begin, span->end - span->begin);

  SessionMarkers markers;
  bool saw_module = false;
  for (const Line& ln : split_lines(region)) {
    auto t = trim(ln.text);
    std::size_t colon = t.find(':');
    if (colon == std::string_view::npos) continue;
    auto key = trim(t.substr(0, colon));
    auto value = trim(t.substr(colon + 1));
    if (key == "Project") {
      markers.project = path_from_string(value);
    } else if (key == "Declared Level") {
      if (auto lvl = level_from_string(value))
        markers.effective_level.declared = *lvl;
    } else if (key == "Effective Level") {
      if (auto lvl = level_from_string(value))
        markers.effective_level.current = *lvl;
    } else if (key == "Current Module") {
      if (auto step = parse_step_ref(std::string(value) + ".1")) {
        markers.current_module = step->first;
        saw_module = true;
      }
    } else if (key == "Current Step") {
      markers.current_step = parse_step_ref(value);
    } else if (key == "Completed Steps") {
      std::size_t pos = 0;
      while (pos < value.size()) {
        while (pos < value.size() && value[pos] == ' ') ++pos;
        std::size_t space = value.find(' ', pos);
        std::string_view token = (space == std::string_view::npos)
                                     ? value.substr(pos)
                                     : value.substr(pos, space - pos);
        if (auto ref = parse_step_ref(token)) markers.completed_steps.insert(*ref);
        if (space == std::string_view::npos) break;
        pos = space + 1;
      }
    }
  }
  if (!saw_module) return std::nullopt;
  return markers;
}

std::string replace_markers_region(std::string_view file_text,
                                   const SessionMarkers& markers) {
  const std::string region = render_markers_region(markers);
  auto span = find_region(file_text);
  if (span) {
    std::string out(file_text.substr(0, span->begin));
    out += region;
    out += file_text.substr(span->end);
    return out;
  }
  std::string out(file_text);
  if (!out.empty() && out.back() != '\n') out += '\n';
  if (!out.empty()) out += '\n';
  out += region;
  return out;
}

std::optional<SessionMarkers> load_markers(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  if (!bytes) return std::nullopt;
  return parse_markers(*bytes);
}

bool save_markers(const std::filesystem::path& path,
                  const SessionMarkers& markers) {
  auto bytes = read_file_bytes(path);
  const std::string current = bytes ? *bytes : std::string();
  return write_file_atomic(path, replace_markers_region(current, markers));
}

std::vector<std::string> pre_advance_check(const SessionMarkers& markers,
                                           const ModuleDoc& doc) {
  std::vector<std::string> missing;
  for (const Step& step : doc.steps) {
    if (!markers.completed_steps.count({step.module_number, step.step_index})) {
      missing.push_back(step.label());
    }
  }
  return missing;
}

std::optional<SessionMarkers> record_step(const SessionMarkers& markers,
                                          const ModuleDoc& doc,
                                          int step_index) {
  bool found = false;
  for (const Step& step : doc.steps) {
    if (step.step_index == step_index && step.module_number == doc.number) {
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;
  SessionMarkers next = markers;
  if (!next.project) next.project = doc.path;
  next.current_module = doc.number;
  next.current_step = std::make_pair(doc.number, step_index);
  next.completed_steps.insert({doc.number, step_index});
  return next;
}

TrackResult track_step(const SessionMarkers& markers, const Corpus& corpus,
                       PathId path, int module, int step_index) {
  TrackResult result;
  result.markers = markers;
  if (markers.project && *markers.project != path) {
    result.message = "markers belong to project " +
                     std::string(to_string(*markers.project));
    return result;
  }
  const ModuleDoc* doc = corpus.find(path, module);
  if (!doc) {
    result.message = "module " + std::to_string(module) + " not found for " +
                     std::string(to_string(path));
    return result;
  }
  if (module > markers.current_module + 1) {
    result.message = "cannot jump from module " +
                     std::to_string(markers.current_module) + " to " +
                     std::to_string(module);
    return result;
  }
  if (module < markers.current_module) {
    result.message = "module " + std::to_string(module) +
                     " is behind current module " +
                     std::to_string(markers.current_module);
    return result;
  }
  if (module == markers.current_module + 1) {
    const ModuleDoc* current = corpus.find(path, markers.current_module);
    if (!current) {
      result.message = "current module " +
                       std::to_string(markers.current_module) +
                       " not found for " + std::string(to_string(path));
      return result;
    }
    result.missing = pre_advance_check(markers, *current);
    if (!result.missing.empty()) {
      result.message = "module " + std::to_string(markers.current_module) +
                       " has unfinished steps";
      return result;
    }
  }
  auto next = record_step(markers, *doc, step_index);
  if (!next) {
    result.message = "step " + std::to_string(module) + "." +
                     std::to_string(step_index) + " does not exist";
    return result;
  }
  result.ok = true;
  result.markers = *next;
  return result;
}

}  // namespace curricula
