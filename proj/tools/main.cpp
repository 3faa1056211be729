#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curricula/adaptation.hpp"
#include "curricula/corpus.hpp"
#include "curricula/engagement.hpp"
#include "curricula/fs_util.hpp"
#include "curricula/persona.hpp"
#include "curricula/session_state.hpp"
#include "curricula/sync.hpp"
#include "curricula/validator.hpp"

namespace {

using namespace curricula;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// Operation ownership table. Every engine operation is reachable through
// exactly one subcommand; `self-describe` prints this for the coverage test.
struct RegistryRow {
  const char* operation;
  const char* subcommand;
};

constexpr RegistryRow kRegistry[] = {
    {"parse_module", "validate"},
    {"load_corpus", "validate"},
    {"serialize", "sync"},
    {"validate_completeness", "validate"},
    {"validate_structure", "validate"},
    {"validate_parity", "validate"},
    {"validate_schedules", "validate"},
    {"validate_all", "validate"},
    {"persona_for", "validate"},
    {"shift_level", "adapt-boundary"},
    {"classify", "observe"},
    {"update_profile", "observe"},
    {"compute_trend", "observe"},
    {"observe", "observe"},
    {"make_note", "inject-context"},
    {"decide_boundary", "adapt-boundary"},
    {"apply_boundary", "adapt-boundary"},
    {"advance", "onboard advance"},
    {"resume_check", "onboard resume-check"},
    {"record_step", "track-step"},
    {"pre_advance_check", "pre-advance"},
    {"detect_gap", "sync"},
    {"triage", "sync"},
    {"map_entries", "sync"},
    {"apply_update", "sync"},
    {"run_sync", "sync"},
    {"dispatch", "(root)"},
};

std::string read_or_die(const std::string& path, const char* what) {
  auto bytes = read_file_bytes(path);
  if (!bytes) {
    throw CLI::ValidationError(std::string("cannot read ") + what + ": " + path);
  }
  return *bytes;
}

int cmd_validate(const std::string& root, const std::string& rules_csv,
                 const std::string& schedule_path, const std::string& format) {
  PersonaSchedule schedule = builtin_schedule();
  if (!schedule_path.empty()) {
    auto parsed = parse_schedule_file(read_or_die(schedule_path, "schedule"));
    if (!parsed.errors.empty()) {
      for (const auto& e : parsed.errors) std::cerr << e << "\n";
      return kExitUsage;
    }
    schedule = parsed.schedule;
  }
  ValidatorConfig config;
  if (!rules_csv.empty()) {
    config.enabled_rules.clear();
    std::size_t pos = 0;
    while (pos <= rules_csv.size()) {
      std::size_t comma = rules_csv.find(',', pos);
      std::string token = comma == std::string::npos
                              ? rules_csv.substr(pos)
                              : rules_csv.substr(pos, comma - pos);
      if (!token.empty()) {
        auto rule = rule_from_string(token);
        if (!rule) {
          std::cerr << "unknown rule: " << token << "\n";
          return kExitUsage;
        }
        config.enabled_rules.insert(*rule);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  CorpusResult loaded = load_corpus(root);
  ValidationReport report = validate_all(loaded.corpus, schedule, config);
  std::cout << (format == "machine" ? render_report_machine(report)
                                    : render_report_text(report));
  return report.pass ? kExitOk : kExitDomain;
}

int cmd_observe(const std::string& transcript, const std::string& profile,
                const std::string& lexicon_path) {
  Lexicon lexicon = Lexicon::defaults();
  if (!lexicon_path.empty()) {
    auto bytes = read_file_bytes(lexicon_path);
    if (bytes) {
      if (auto parsed = parse_lexicon(*bytes)) {
        lexicon = *parsed;
      } else {
        std::cerr << "skipped: bad lexicon file\n";
        return kExitOk;
      }
    } else {
      std::cerr << "skipped: unreadable lexicon file\n";
      return kExitOk;
    }
  }
  ObserveStatus status = observe(transcript, profile, lexicon);
  if (status != ObserveStatus::applied) {
    std::cerr << to_string(status) << "\n";
  }
  // The host hook must never see a failure, whatever happened.
  return kExitOk;
}

int cmd_inject_context(const std::string& profile_path) {
  LearnerProfile profile = load_profile(profile_path);
  if (auto note = make_note(profile)) {
    std::cout << note->rendered << "\n";
  }
  return kExitOk;
}

int cmd_adapt_boundary(const std::string& profile_path,
                       const std::string& markers_path) {
  auto markers = load_markers(markers_path);
  if (!markers) {
    std::cerr << "no session markers at " << markers_path << "\n";
    return kExitUsage;
  }
  FileLock::Status lock_status = FileLock::Status::error;
  FileLock lock = FileLock::for_target(profile_path, std::chrono::seconds(10),
                                       lock_status);
  if (lock_status != FileLock::Status::acquired) {
    std::cerr << "profile lock held; try again\n";
    return kExitUsage;
  }
  LearnerProfile profile = load_profile(profile_path);
  BoundaryOutcome outcome = apply_boundary(profile, markers->effective_level);
  markers->effective_level = outcome.level;
  if (!save_profile(profile_path, outcome.profile) ||
      !save_markers(markers_path, *markers)) {
    std::cerr << "failed to persist profile or markers\n";
    return kExitUsage;
  }
  std::cout << "direction\t" << to_string(outcome.decision.direction)
            << "\taverage\t" << outcome.decision.module_average
            << "\tproductive\t" << outcome.decision.productive_share
            << "\tunproductive\t" << outcome.decision.unproductive_share
            << "\teffective\t" << to_string(outcome.level.current) << "\n";
  return kExitOk;
}

void print_state(const OnboardingState& state) {
  std::cout << "stage " << to_string(state.stage) << "\n";
  if (state.answers.project)
    std::cout << "project " << to_string(*state.answers.project) << "\n";
  if (state.answers.language)
    std::cout << "language " << *state.answers.language << "\n";
  if (state.answers.experience)
    std::cout << "experience " << to_string(*state.answers.experience) << "\n";
  if (state.answers.os) std::cout << "os " << *state.answers.os << "\n";
  if (state.answers.curriculum_version)
    std::cout << "curriculum_version " << *state.answers.curriculum_version
              << "\n";
  if (state.answers.latest_version)
    std::cout << "latest_version " << *state.answers.latest_version << "\n";
  std::cout << "version_gap " << (state.version_gap ? "yes" : "no") << "\n";
}

OnboardingState load_state_or_fresh(const std::string& path, bool& corrupt) {
  corrupt = false;
  auto bytes = read_file_bytes(path);
  if (!bytes) return OnboardingState{};
  auto state = state_from_json(*bytes);
  if (!state) {
    corrupt = true;
    return OnboardingState{};
  }
  return *state;
}

int cmd_onboard_status(const std::string& state_path) {
  bool corrupt = false;
  OnboardingState state = load_state_or_fresh(state_path, corrupt);
  if (corrupt) {
    std::cerr << "corrupt state file: " << state_path << "\n";
    return kExitUsage;
  }
  print_state(state);
  if (state.stage != Stage::complete) {
    std::cout << "expects " << expected_input_name(state.stage) << "\n";
  }
  return kExitOk;
}

struct AdvanceFlags {
  std::string current, latest, project, os, language, experience, choice;
  bool ack = false;
};

int cmd_onboard_advance(const std::string& state_path,
                        const std::string& markers_path,
                        const AdvanceFlags& flags) {
  bool corrupt = false;
  OnboardingState state = load_state_or_fresh(state_path, corrupt);
  if (corrupt) {
    std::cerr << "corrupt state file: " << state_path << "\n";
    return kExitUsage;
  }

  AdvanceInput input = Ack{};
  switch (state.stage) {
    case Stage::version_check: {
      if (flags.current.empty() || flags.latest.empty()) {
        std::cerr << "stage version_check needs --current and --latest\n";
        return kExitUsage;
      }
      input = VersionCheckAnswer{flags.current, flags.latest};
      break;
    }
    case Stage::project_selection: {
      auto project = path_from_string(flags.project);
      if (!project) {
        std::cerr << "stage project_selection needs --project "
                     "(canvas|forge|nexus|sentinel|byop)\n";
        return kExitUsage;
      }
      input = *project;
      break;
    }
    case Stage::os_detection: {
      if (flags.os.empty()) {
        std::cerr << "stage os_detection needs --os\n";
        return kExitUsage;
      }
      input = flags.os;
      break;
    }
    case Stage::language_selection: {
      if (flags.language.empty()) {
        std::cerr << "stage language_selection needs --language\n";
        return kExitUsage;
      }
      input = flags.language;
      break;
    }
    case Stage::experience_level: {
      auto level = level_from_string(flags.experience);
      if (!level) {
        std::cerr << "stage experience_level needs --experience "
                     "(beginner|intermediate|advanced)\n";
        return kExitUsage;
      }
      input = *level;
      break;
    }
    case Stage::progress_resume: {
      if (flags.choice == "resume") {
        input = ResumeChoice::resume;
      } else if (flags.choice == "restart") {
        input = ResumeChoice::restart;
      } else {
        std::cerr << "stage progress_resume needs --choice (resume|restart)\n";
        return kExitUsage;
      }
      break;
    }
    case Stage::curriculum_upgrade:
    case Stage::env_verification:
    case Stage::scaffolding:
    case Stage::module1_delivery: {
      if (!flags.ack) {
        std::cerr << "stage " << to_string(state.stage) << " needs --ack\n";
        return kExitUsage;
      }
      input = Ack{};
      break;
    }
    case Stage::complete: {
      std::cerr << "onboarding is complete\n";
      return kExitUsage;
    }
  }

  AdvanceContext ctx;
  ctx.markers_exist =
      !markers_path.empty() && load_markers(markers_path).has_value();
  OnboardingState next;
  try {
    next = advance(state, input, ctx);
  } catch (const StateError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  if (!save_state(state_path, next)) {
    std::cerr << "failed to persist state to " << state_path << "\n";
    return kExitUsage;
  }
  std::cout << "stage " << to_string(next.stage) << "\n";
  return kExitOk;
}

int cmd_onboard_resume_check(const std::string& state_path,
                             const std::string& markers_path) {
  bool corrupt = false;
  OnboardingState state = load_state_or_fresh(state_path, corrupt);
  if (corrupt) {
    std::cerr << "corrupt state file: " << state_path << "\n";
    return kExitUsage;
  }
  auto markers = load_markers(markers_path);
  ResumeStatus status = resume_check(state, markers);
  std::cout << to_string(status) << "\n";
  return status == ResumeStatus::resume_conflict ? kExitDomain : kExitOk;
}

int cmd_track_step(const std::string& markers_path, const std::string& root,
                   const std::string& path_name, int module, int step,
                   const std::string& init_level) {
  auto path = path_from_string(path_name);
  if (!path) {
    std::cerr << "unknown path id: " << path_name << "\n";
    return kExitUsage;
  }
  CorpusResult loaded = load_corpus(root);
  auto markers = load_markers(markers_path);
  if (!markers) {
    auto level = level_from_string(init_level);
    if (!level) {
      std::cerr << "unknown level: " << init_level << "\n";
      return kExitUsage;
    }
    SessionMarkers fresh;
    fresh.project = *path;
    fresh.effective_level = EffectiveLevel{*level, *level};
    markers = fresh;
  }
  TrackResult result = track_step(*markers, loaded.corpus, *path, module, step);
  if (!result.ok) {
    std::cerr << result.message << "\n";
    for (const auto& label : result.missing) {
      std::cout << "missing " << label << "\n";
    }
    return kExitDomain;
  }
  if (!save_markers(markers_path, result.markers)) {
    std::cerr << "failed to persist markers to " << markers_path << "\n";
    return kExitUsage;
  }
  std::cout << "recorded " << module << "." << step << "\n";
  return kExitOk;
}

int cmd_pre_advance(const std::string& markers_path, const std::string& root,
                    const std::string& path_name, int module) {
  auto markers = load_markers(markers_path);
  if (!markers) {
    std::cerr << "no session markers at " << markers_path << "\n";
    return kExitUsage;
  }
  std::optional<PathId> path = markers->project;
  if (!path_name.empty()) path = path_from_string(path_name);
  if (!path) {
    std::cerr << "no project path (markers carry none; pass --path)\n";
    return kExitUsage;
  }
  const int module_number = module > 0 ? module : markers->current_module;
  CorpusResult loaded = load_corpus(root);
  const ModuleDoc* doc = loaded.corpus.find(*path, module_number);
  if (!doc) {
    std::cerr << "module " << module_number << " not found for "
              << to_string(*path) << "\n";
    return kExitUsage;
  }
  auto missing = pre_advance_check(*markers, *doc);
  for (const auto& label : missing) {
    std::cout << "missing " << label << "\n";
  }
  return missing.empty() ? kExitOk : kExitDomain;
}

int cmd_sync(const std::string& root, const std::string& changelog_path,
             const std::string& fmap_path, const std::string& payloads_dir,
             const std::string& scope_name, bool dry_run,
             const std::string& current, const std::string& latest,
             const std::string& format) {
  SyncOptions options;
  options.current = current;
  options.latest = latest;
  options.dry_run = dry_run;
  if (!scope_name.empty() && scope_name != "all") {
    auto scope = path_from_string(scope_name);
    if (!scope) {
      std::cerr << "unknown scope: " << scope_name << "\n";
      return kExitUsage;
    }
    options.scope = *scope;
  }

  const std::string changelog = read_or_die(changelog_path, "changelog");
  auto fmap = parse_feature_map(read_or_die(fmap_path, "feature map"));
  if (!fmap.errors.empty()) {
    for (const auto& e : fmap.errors) std::cerr << e << "\n";
    return kExitUsage;
  }

  std::vector<UpdatePayload> payloads;
  if (!payloads_dir.empty()) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(payloads_dir)) {
      std::cerr << "payload directory not found: " << payloads_dir << "\n";
      return kExitUsage;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(payloads_dir)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      auto parsed = parse_payload(read_or_die(file.string(), "payload"));
      if (!parsed.payload) {
        std::cerr << file.string() << ": " << parsed.error << "\n";
        return kExitUsage;
      }
      payloads.push_back(std::move(*parsed.payload));
    }
  }

  CorpusResult loaded = load_corpus(root);
  SyncPlan plan;
  try {
    plan = run_sync(loaded.corpus, changelog, fmap.map, payloads, options);
  } catch (const SyncLockedError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << (format == "machine" ? render_plan_machine(plan)
                                    : render_plan_text(plan));
  for (const auto& file : plan.applied) {
    if (file.outcome == FileOutcome::reverted) return kExitDomain;
  }
  return kExitOk;
}

int cmd_self_describe() {
  for (const auto& row : kRegistry) {
    std::cout << row.operation << "\t" << row.subcommand << "\n";
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Curriculum engine: corpus validation, engagement tracking, "
               "adaptive scaffolding, onboarding state, and safe curriculum "
               "sync."};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Check a curriculum corpus against the structural rules");
  std::string v_root, v_rules, v_schedule, v_format = "text";
  validate->add_option("root", v_root, "Corpus root directory")
      ->required()
      ->envname("CURRICULA_ROOT");
  validate->add_option("--rules", v_rules, "Comma-separated rule ids to check");
  validate->add_option("--schedule", v_schedule, "Schedule override file");
  validate->add_option("--format", v_format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));

  // observe
  auto* observe_cmd = app.add_subcommand(
      "observe", "Classify the latest learner message into the profile");
  std::string o_transcript, o_profile, o_lexicon;
  observe_cmd->add_option("--transcript", o_transcript, "Transcript file (JSON lines)")
      ->required()
      ->envname("CURRICULA_TRANSCRIPT");
  observe_cmd->add_option("--profile", o_profile, "Learner profile file")
      ->required()
      ->envname("CURRICULA_PROFILE");
  observe_cmd->add_option("--lexicon", o_lexicon, "Lexicon override file");

  // inject-context
  auto* inject = app.add_subcommand(
      "inject-context", "Print the session-start teaching note, if any");
  std::string i_profile;
  inject->add_option("--profile", i_profile, "Learner profile file")
      ->required()
      ->envname("CURRICULA_PROFILE");

  // adapt-boundary
  auto* boundary = app.add_subcommand(
      "adapt-boundary", "Apply the module-boundary level decision");
  std::string b_profile, b_markers;
  boundary->add_option("--profile", b_profile, "Learner profile file")
      ->required()
      ->envname("CURRICULA_PROFILE");
  boundary->add_option("--state", b_markers, "Session markers file")
      ->required()
      ->envname("CURRICULA_MARKERS");

  // onboard
  auto* onboard = app.add_subcommand("onboard", "Onboarding state machine");
  onboard->require_subcommand(1);
  auto* ob_status = onboard->add_subcommand("status", "Show the current stage");
  std::string s_state;
  ob_status->add_option("--state", s_state, "Onboarding state file")
      ->required()
      ->envname("CURRICULA_STATE");

  auto* ob_advance = onboard->add_subcommand("advance", "Advance one stage");
  std::string a_state, a_markers;
  AdvanceFlags a_flags;
  ob_advance->add_option("--state", a_state, "Onboarding state file")
      ->required()
      ->envname("CURRICULA_STATE");
  ob_advance->add_option("--markers", a_markers, "Session markers file")
      ->envname("CURRICULA_MARKERS");
  ob_advance->add_option("--current", a_flags.current, "Installed curriculum version");
  ob_advance->add_option("--latest", a_flags.latest, "Latest released version");
  ob_advance->add_option("--project", a_flags.project, "Project path id");
  ob_advance->add_option("--os", a_flags.os, "Operating system name");
  ob_advance->add_option("--language", a_flags.language, "Implementation language");
  ob_advance->add_option("--experience", a_flags.experience, "Experience level");
  ob_advance->add_option("--choice", a_flags.choice, "resume or restart");
  ob_advance->add_flag("--ack", a_flags.ack, "Acknowledge a host-performed step");

  auto* ob_resume = onboard->add_subcommand(
      "resume-check", "Compare prior markers against current answers");
  std::string r_state, r_markers;
  ob_resume->add_option("--state", r_state, "Onboarding state file")
      ->required()
      ->envname("CURRICULA_STATE");
  ob_resume->add_option("--markers", r_markers, "Session markers file")
      ->required()
      ->envname("CURRICULA_MARKERS");

  // track-step
  auto* track = app.add_subcommand("track-step", "Record a completed step");
  std::string t_markers, t_root, t_path, t_level = "beginner";
  int t_module = 0, t_step = 0;
  track->add_option("--markers", t_markers, "Session markers file")
      ->required()
      ->envname("CURRICULA_MARKERS");
  track->add_option("--root", t_root, "Corpus root directory")
      ->required()
      ->envname("CURRICULA_ROOT");
  track->add_option("--path", t_path, "Project path id")->required();
  track->add_option("--module", t_module, "Module number")->required();
  track->add_option("--step", t_step, "Step index")->required();
  track->add_option("--level", t_level,
                    "Declared level used when creating fresh markers");

  // pre-advance
  auto* pre = app.add_subcommand(
      "pre-advance", "List steps still missing before the next module");
  std::string p_markers, p_root, p_path;
  int p_module = 0;
  pre->add_option("--markers", p_markers, "Session markers file")
      ->required()
      ->envname("CURRICULA_MARKERS");
  pre->add_option("--root", p_root, "Corpus root directory")
      ->required()
      ->envname("CURRICULA_ROOT");
  pre->add_option("--path", p_path, "Project path id (default: from markers)");
  pre->add_option("--module", p_module,
                  "Module number (default: current module)");

  // sync
  auto* sync_cmd = app.add_subcommand(
      "sync", "Apply changelog-driven curriculum updates");
  std::string y_root, y_changelog, y_fmap, y_payloads, y_scope = "all";
  std::string y_current, y_latest, y_format = "text";
  bool y_dry = false;
  sync_cmd->add_option("--root", y_root, "Corpus root directory")
      ->required()
      ->envname("CURRICULA_ROOT");
  sync_cmd->add_option("--changelog", y_changelog, "Changelog file")->required();
  sync_cmd->add_option("--feature-map", y_fmap, "Feature map file")->required();
  sync_cmd->add_option("--payloads", y_payloads, "Directory of payload files");
  sync_cmd->add_option("--scope", y_scope, "Path id to touch, or 'all'");
  sync_cmd->add_option("--current", y_current, "Last synced version")->required();
  sync_cmd->add_option("--latest", y_latest, "Latest released version")->required();
  sync_cmd->add_flag("--dry-run", y_dry, "Plan without writing");
  sync_cmd->add_option("--format", y_format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));

  // self-describe (hidden): operation ownership for the coverage test.
  auto* describe = app.add_subcommand("self-describe", "");
  describe->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed())
      return cmd_validate(v_root, v_rules, v_schedule, v_format);
    if (observe_cmd->parsed()) return cmd_observe(o_transcript, o_profile, o_lexicon);
    if (inject->parsed()) return cmd_inject_context(i_profile);
    if (boundary->parsed()) return cmd_adapt_boundary(b_profile, b_markers);
    if (onboard->parsed()) {
      if (ob_status->parsed()) return cmd_onboard_status(s_state);
      if (ob_advance->parsed())
        return cmd_onboard_advance(a_state, a_markers, a_flags);
      if (ob_resume->parsed()) return cmd_onboard_resume_check(r_state, r_markers);
    }
    if (track->parsed())
      return cmd_track_step(t_markers, t_root, t_path, t_module, t_step, t_level);
    if (pre->parsed()) return cmd_pre_advance(p_markers, p_root, p_path, p_module);
    if (sync_cmd->parsed())
      return cmd_sync(y_root, y_changelog, y_fmap, y_payloads, y_scope, y_dry,
                      y_current, y_latest, y_format);
    if (describe->parsed()) return cmd_self_describe();
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
