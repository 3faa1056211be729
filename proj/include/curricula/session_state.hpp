#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "curricula/corpus.hpp"
#include "curricula/persona.hpp"

namespace curricula {

enum class Stage {
  version_check,
  project_selection,
  curriculum_upgrade,
  os_detection,
  language_selection,
  experience_level,
  progress_resume,
  env_verification,
  scaffolding,
  module1_delivery,
  complete,
};

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view s);

struct Answers {
  std::optional<PathId> project;
  std::optional<std::string> language;
  std::optional<ExperienceLevel> experience;
  std::optional<std::string> os;
  std::optional<std::string> curriculum_version;
  std::optional<std::string> latest_version;
};

struct OnboardingState {
  int schema_version = 1;
  Stage stage = Stage::version_check;
  Answers answers;
  bool version_gap = false;
  std::string updated_at;
};

struct Ack {};
struct VersionCheckAnswer {
  std::string current;
  std::string latest;
};
enum class ResumeChoice { resume, restart };

using AdvanceInput =
    std::variant<Ack, VersionCheckAnswer, PathId, std::string, ExperienceLevel,
                 ResumeChoice>;

struct AdvanceContext {
  bool markers_exist = false;
};

// Wrong input type for the stage, unparseable versions, or advancing a
// complete state. These are caller bugs, hence exceptions.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// What the current stage expects, for errors and usage text.
std::string_view expected_input_name(Stage s);

// One transition of the onboarding machine. Stage order is fixed;
// curriculum_upgrade is skipped without a version gap, language_selection for
// canvas and byop projects, progress_resume when no markers file exists.
OnboardingState advance(const OnboardingState& state, const AdvanceInput& input,
                        const AdvanceContext& ctx, std::string now_iso = {});

std::string state_to_json(const OnboardingState& state);
std::optional<OnboardingState> state_from_json(std::string_view text);
std::optional<OnboardingState> load_state(const std::filesystem::path& path);
bool save_state(const std::filesystem::path& path,
                const OnboardingState& state);

struct SessionMarkers {
  std::optional<PathId> project;
  int current_module = 1;
  std::optional<std::pair<int, int>> current_step;
  EffectiveLevel effective_level;
  std::set<std::pair<int, int>> completed_steps;
};

enum class ResumeStatus { fresh, resume_valid, resume_conflict };

std::string_view to_string(ResumeStatus s);

ResumeStatus resume_check(const OnboardingState& state,
                          const std::optional<SessionMarkers>& markers);

// The marker block lives inside a host-owned file. Only the delimited region
// is ever rewritten; every byte outside it is preserved.
inline constexpr std::string_view kMarkersBegin = "<!-- curricula:state -->";
inline constexpr std::string_view kMarkersEnd = "<!-- /curricula:state -->";

std::string render_markers_region(const SessionMarkers& markers);
std::optional<SessionMarkers> parse_markers(std::string_view file_text);
std::string replace_markers_region(std::string_view file_text,
                                   const SessionMarkers& markers);
std::optional<SessionMarkers> load_markers(const std::filesystem::path& path);
bool save_markers(const std::filesystem::path& path,
                  const SessionMarkers& markers);

// Step labels of doc not yet completed, in document order. Empty output
// authorizes advancing past doc.
std::vector<std::string> pre_advance_check(const SessionMarkers& markers,
                                           const ModuleDoc& doc);

// Marks (doc.number, step_index) current and completed. Nullopt when the
// step does not exist in doc.
std::optional<SessionMarkers> record_step(const SessionMarkers& markers,
                                          const ModuleDoc& doc,
                                          int step_index);

struct TrackResult {
  bool ok = false;
  SessionMarkers markers;
  std::vector<std::string> missing;  // steps blocking a module advance
  std::string message;
};

// record_step with the advancement gate: steps record freely within the
// current module; moving to module n+1 requires module n's checkpoint steps
// to be complete; larger jumps and backward moves are rejected.
TrackResult track_step(const SessionMarkers& markers, const Corpus& corpus,
                       PathId path, int module, int step_index);

}  // namespace curricula
