#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curricula/fs_util.hpp"
#include "curricula/sync.hpp"
#include "curricula/validator.hpp"
#include "support/fixture_corpus.hpp"

using namespace curricula;
namespace fs = std::filesystem;

namespace {

const char kChangelog[] =
    "# Changelog\n"
    "\n"
    "## [2.26.0]\n"
    "### Added\n"
    "- Feature above the gap\n"
    "\n"
    "## [2.25.0]\n"
    "### Added\n"
    "- Sandboxed bash execution for hooks\n"
    "### Changed\n"
    "- MCP server scopes now default to project\n"
    "### Fixed\n"
    "- Crash when transcript is empty\n"
    "### Security\n"
    "- Hardened lock handling\n"
    "\n"
    "## [2.20.0]\n"
    "### Removed\n"
    "- Legacy worktree mirror flag\n"
    "\n"
    "## [2.12.0]\n"
    "### Added\n"
    "- Feature already synced\n";

UpdatePayload make_module_payload(PathId path, int module,
                                  const std::string& content) {
  UpdatePayload p;
  p.module_target = ModuleTarget{path, module};
  p.content = content;
  return p;
}

UpdatePayload make_context_payload(const std::string& name,
                                   const std::string& content) {
  UpdatePayload p;
  p.context_target = name;
  p.content = content;
  return p;
}

struct TempCorpus {
  fs::path root;
  explicit TempCorpus(const std::string& tag)
      : root(fixtures::make_temp_dir(tag)) {
    fixtures::write_clean_corpus(root);
  }
  ~TempCorpus() { fs::remove_all(root); }
  Corpus load() const {
    auto result = load_corpus(root);
    REQUIRE(result.issues.empty());
    return std::move(result.corpus);
  }
  std::string bytes(const std::string& rel) const {
    auto content = read_file_bytes(root / rel);
    REQUIRE(content.has_value());
    return *content;
  }
};

}  // namespace

TEST_CASE("gap detection compares versions, not strings") {
  CHECK_FALSE(detect_gap("2.12.0", "2.12.0").has_value());
  CHECK_FALSE(detect_gap("2.25.0", "2.12.0").has_value());
  CHECK_FALSE(detect_gap("2.12.1", "2.12.1").has_value());

  auto gap = detect_gap("2.12.0", "2.25.0");
  REQUIRE(gap.has_value());
  CHECK(gap->from_excl.str() == "2.12.0");
  CHECK(gap->to_incl.str() == "2.25.0");
  CHECK_FALSE(gap->contains(*Version::parse("2.12.0")));
  CHECK(gap->contains(*Version::parse("2.12.1")));
  CHECK(gap->contains(*Version::parse("2.25.0")));
  CHECK_FALSE(gap->contains(*Version::parse("2.26.0")));

  CHECK(detect_gap("v2.12.0", "v2.25.0").has_value());
  CHECK(detect_gap("2.9", "2.10").has_value());
  CHECK_THROWS_AS(detect_gap("fish", "2.25.0"), std::invalid_argument);
  CHECK_THROWS_AS(detect_gap("2.12.0", ""), std::invalid_argument);
}

TEST_CASE("triage keeps added, changed, and removed bullets inside the gap") {
  auto gap = detect_gap("2.12.0", "2.25.0");
  REQUIRE(gap.has_value());
  auto entries = triage(kChangelog, *gap);

  REQUIRE(entries.size() == 3);
  CHECK(entries[0].text == "Sandboxed bash execution for hooks");
  CHECK(entries[0].section == Section::added);
  CHECK(entries[0].version.str() == "2.25.0");
  CHECK(entries[1].text == "MCP server scopes now default to project");
  CHECK(entries[1].section == Section::changed);
  CHECK(entries[2].text == "Legacy worktree mirror flag");
  CHECK(entries[2].section == Section::removed);
  CHECK(entries[2].version.str() == "2.20.0");
}

TEST_CASE("triage requires version headings") {
  auto gap = detect_gap("1.0.0", "2.0.0");
  REQUIRE(gap.has_value());
  CHECK_THROWS_AS(triage("just some text\n- a bullet\n", *gap),
                  std::invalid_argument);
  CHECK(triage("## [1.5.0]\nprose without bullets\n", *gap).empty());
}

TEST_CASE("feature map parsing handles targets, comments, and errors") {
  auto result = parse_feature_map(
      "# routing table\n"
      "hooks -> modules: 5,7; context: hooks.md\n"
      "scopes -> modules: 6\n"
      "worktree -> context: worktrees.md\n"
      "* -> context: context-management.md\n");
  CHECK(result.errors.empty());
  REQUIRE(result.map.rules.size() == 4);
  CHECK(result.map.rules[0].pattern == "hooks");
  CHECK(result.map.rules[0].modules == std::vector<int>{5, 7});
  CHECK(result.map.rules[0].context_files ==
        std::vector<std::string>{"hooks.md"});
  CHECK(result.map.rules[1].context_files.empty());
  CHECK(result.map.rules[3].pattern == "*");

  auto bad = parse_feature_map("no arrow here\n -> modules: 1\n");
  CHECK(bad.errors.size() == 2);
}

TEST_CASE("entry mapping is first match wins with an unmapped bucket") {
  auto fmap = parse_feature_map(
      "hooks -> modules: 5,7; context: hooks.md\n"
      "scopes -> modules: 6\n"
      "worktree -> modules: 10; context: worktrees.md\n");
  REQUIRE(fmap.errors.empty());

  auto gap = detect_gap("2.12.0", "2.25.0");
  auto entries = triage(kChangelog, *gap);
  auto mapped = map_entries(entries, fmap.map);

  REQUIRE(mapped.size() == 3);
  CHECK_FALSE(mapped[0].unmapped);
  CHECK(mapped[0].modules == std::vector<int>{5, 7});
  CHECK(mapped[1].modules == std::vector<int>{6});
  CHECK(mapped[2].modules == std::vector<int>{10});
  CHECK(mapped[2].context_files == std::vector<std::string>{"worktrees.md"});

  auto nothing = map_entries(
      {ChangelogEntry{*Version::parse("2.20.0"), Section::added,
                      "Completely novel concept"}},
      fmap.map);
  REQUIRE(nothing.size() == 1);
  CHECK(nothing[0].unmapped);

  auto wildcard = parse_feature_map("* -> modules: 1\nhooks -> modules: 5\n");
  auto all_first = map_entries(entries, wildcard.map);
  for (const auto& m : all_first) {
    CHECK_FALSE(m.unmapped);
    CHECK(m.modules == std::vector<int>{1});
  }

  auto icase = parse_feature_map("HOOKS -> modules: 5\n");
  auto matched = map_entries(
      {ChangelogEntry{*Version::parse("2.20.0"), Section::added,
                      "better hooks"}},
      icase.map);
  CHECK_FALSE(matched[0].unmapped);
}

TEST_CASE("payload files parse headers then content") {
  auto good = parse_payload(
      "target: forge/5\n"
      "source: Sandboxed bash execution for hooks\n"
      "---\n"
      "Step: Run hooks in the sandbox\n"
      "Try the new confinement mode.\n");
  REQUIRE(good.payload.has_value());
  REQUIRE(good.payload->module_target.has_value());
  CHECK(good.payload->module_target->path == PathId::forge);
  CHECK(good.payload->module_target->module == 5);
  CHECK(good.payload->source_entry ==
        "Sandboxed bash execution for hooks");
  CHECK(good.payload->content.find("Step: Run hooks") != std::string::npos);

  auto ctx = parse_payload("target: context/hooks.md\n---\nfresh notes\n");
  REQUIRE(ctx.payload.has_value());
  CHECK(ctx.payload->context_target == "hooks.md");
  CHECK_FALSE(ctx.payload->module_target.has_value());

  CHECK_FALSE(parse_payload("---\ncontent\n").payload.has_value());
  CHECK_FALSE(parse_payload("target: forge/5\ncontent only\n").payload
                  .has_value());
  CHECK_FALSE(parse_payload("target: mystery/5\n---\nx\n").payload
                  .has_value());
  CHECK_FALSE(parse_payload("target: forge/11\n---\nx\n").payload
                  .has_value());
  CHECK_FALSE(parse_payload("target: forge/five\n---\nx\n").payload
                  .has_value());
  CHECK_FALSE(parse_payload("flavor: mint\n---\nx\n").payload.has_value());
  CHECK(parse_payload("target: forge/11\n---\nx\n").error ==
        "module out of range in target 'forge/11'");
}

TEST_CASE("apply_update appends numbered steps before the checkpoint") {
  TempCorpus tc("apply");
  Corpus corpus = tc.load();
  const ModuleDoc* doc = corpus.find(PathId::forge, 5);
  REQUIRE(doc != nullptr);
  REQUIRE(doc->steps.size() == 4);

  auto payload = make_module_payload(
      PathId::forge, 5,
      "Step: Run hooks in the sandbox\n"
      "Try the new confinement mode.\n"
      "\n"
      "Step: Audit the hook log\n"
      "Confirm both runs landed.\n");
  auto applied = apply_update(*doc, payload);
  REQUIRE(std::holds_alternative<ModuleDoc>(applied));
  const ModuleDoc& next = std::get<ModuleDoc>(applied);

  REQUIRE(next.steps.size() == 6);
  CHECK(next.steps[4].label() == "5.5");
  CHECK(next.steps[4].heading == "Run hooks in the sandbox");
  CHECK(next.steps[5].label() == "5.6");
  CHECK(next.steps[5].heading == "Audit the hook log");
  CHECK(next.has_checkpoint);

  const auto prefix = static_cast<std::size_t>(doc->checkpoint_offset);
  CHECK(next.raw_text.compare(0, prefix, doc->raw_text, 0, prefix) == 0);
  CHECK(next.raw_text.size() > doc->raw_text.size());
  CHECK(parse_module(next.raw_text, PathId::forge, 5).errors.empty());
}

TEST_CASE("apply_update without step markers treats content as one step") {
  TempCorpus tc("apply-single");
  Corpus corpus = tc.load();
  const ModuleDoc* doc = corpus.find(PathId::canvas, 2);
  REQUIRE(doc != nullptr);

  auto payload = make_module_payload(PathId::canvas, 2,
                                     "Review the new planner\n"
                                     "It now persists across sessions.\n");
  auto applied = apply_update(*doc, payload);
  REQUIRE(std::holds_alternative<ModuleDoc>(applied));
  const ModuleDoc& next = std::get<ModuleDoc>(applied);
  REQUIRE(next.steps.size() == 5);
  CHECK(next.steps[4].label() == "2.5");
  CHECK(next.steps[4].heading == "Review the new planner");
  CHECK(next.steps[4].body.find("persists across sessions") !=
        std::string::npos);
}

TEST_CASE("apply_update is identity on empty content") {
  TempCorpus tc("apply-empty");
  Corpus corpus = tc.load();
  const ModuleDoc* doc = corpus.find(PathId::nexus, 3);
  auto payload = make_module_payload(PathId::nexus, 3, "  \n\n");
  auto applied = apply_update(*doc, payload);
  REQUIRE(std::holds_alternative<ModuleDoc>(applied));
  CHECK(std::get<ModuleDoc>(applied).raw_text == doc->raw_text);
}

TEST_CASE("apply_update rejects mismatched targets and missing checkpoints") {
  TempCorpus tc("apply-errors");
  Corpus corpus = tc.load();
  const ModuleDoc* doc = corpus.find(PathId::forge, 5);

  auto wrong = apply_update(*doc, make_module_payload(PathId::canvas, 5,
                                                      "Step: x\n"));
  REQUIRE(std::holds_alternative<ApplyError>(wrong));
  CHECK(std::get<ApplyError>(wrong).code == ApplyErrorCode::wrong_target);

  auto ctx_payload = make_context_payload("hooks.md", "notes");
  auto not_module = apply_update(*doc, ctx_payload);
  REQUIRE(std::holds_alternative<ApplyError>(not_module));

  std::string no_checkpoint = doc->raw_text.substr(
      0, static_cast<std::size_t>(doc->checkpoint_offset));
  auto truncated = parse_module(no_checkpoint, PathId::forge, 5).doc;
  auto failed = apply_update(truncated, make_module_payload(PathId::forge, 5,
                                                            "Step: x\n"));
  REQUIRE(std::holds_alternative<ApplyError>(failed));
  CHECK(std::get<ApplyError>(failed).code == ApplyErrorCode::no_checkpoint);
}

TEST_CASE("apply_update follows the document's line endings") {
  TempCorpus tc("apply-crlf");
  Corpus corpus = tc.load();
  const ModuleDoc* base = corpus.find(PathId::byop, 1);
  std::string crlf_text;
  for (char c : base->raw_text) {
    if (c == '\n') crlf_text += "\r\n";
    else crlf_text += c;
  }
  auto crlf_doc = parse_module(crlf_text, PathId::byop, 1).doc;

  auto applied = apply_update(
      crlf_doc, make_module_payload(PathId::byop, 1, "Step: Extra move\n"));
  REQUIRE(std::holds_alternative<ModuleDoc>(applied));
  const ModuleDoc& next = std::get<ModuleDoc>(applied);
  auto heading_at = next.raw_text.find("## 1.6 Extra move");
  REQUIRE(heading_at != std::string::npos);
  CHECK(next.raw_text.substr(heading_at + 17, 2) == "\r\n");
}

TEST_CASE("repeated application numbers steps sequentially") {
  TempCorpus tc("apply-twice");
  Corpus corpus = tc.load();
  ModuleDoc doc = *corpus.find(PathId::sentinel, 8);
  REQUIRE(doc.steps.size() == 4);

  for (int round = 0; round < 3; ++round) {
    auto applied = apply_update(
        doc, make_module_payload(PathId::sentinel, 8, "Step: Encore\n"));
    REQUIRE(std::holds_alternative<ModuleDoc>(applied));
    doc = std::get<ModuleDoc>(applied);
  }
  REQUIRE(doc.steps.size() == 7);
  CHECK(doc.steps[4].label() == "8.5");
  CHECK(doc.steps[5].label() == "8.6");
  CHECK(doc.steps[6].label() == "8.7");
  CHECK(parse_module(doc.raw_text, PathId::sentinel, 8).errors.empty());
}

TEST_CASE("run_sync applies module and context payloads end to end") {
  TempCorpus tc("sync-happy");
  Corpus corpus = tc.load();
  auto fmap = parse_feature_map("hooks -> modules: 5; context: hooks.md\n");

  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::forge, 5, "Step: Sandbox the hook\nBody.\n"),
      make_context_payload("hooks.md", "# hooks\n\nRewritten notes.\n"),
  };
  SyncOptions options;
  options.current = "2.12.0";
  options.latest = "2.25.0";

  const std::string before = tc.bytes("projects/forge/05-hooks.md");
  auto plan = run_sync(corpus, kChangelog, fmap.map, payloads, options);

  CHECK(plan.gap);
  CHECK(plan.entries.size() == 3);
  REQUIRE(plan.applied.size() == 2);
  CHECK(plan.applied[0].file == "projects/forge/05-hooks.md");
  CHECK(plan.applied[0].outcome == FileOutcome::updated);
  CHECK(plan.applied[1].file == "context/hooks.md");
  CHECK(plan.applied[1].outcome == FileOutcome::updated);

  const std::string after = tc.bytes("projects/forge/05-hooks.md");
  CHECK(after.size() > before.size());
  CHECK(after.compare(0, before.find("## Checkpoint"), before, 0,
                      before.find("## Checkpoint")) == 0);
  CHECK(tc.bytes("context/hooks.md") == "# hooks\n\nRewritten notes.\n");

  auto reloaded = load_corpus(tc.root);
  CHECK(reloaded.parse_errors.empty());
  auto report = validate_all(reloaded.corpus, builtin_schedule());
  CHECK(report.pass);
  CHECK_FALSE(fs::exists(tc.root / ".sync.lock"));
}

TEST_CASE("run_sync reverts files whose result fails verification") {
  TempCorpus tc("sync-revert");
  Corpus corpus = tc.load();
  auto fmap = parse_feature_map("* -> modules: 7\n");

  // The body smuggles a step heading, so the re-parse sees a misnumbered
  // step and structural validation fails.
  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::byop, 7,
                          "Step: Looks legitimate\n"
                          "## 7.2 Duplicate heading\n"),
  };
  SyncOptions options{"2.12.0", "2.25.0", std::nullopt, false};

  const std::string before = tc.bytes("projects/byop/07-guard-rails.md");
  auto plan = run_sync(corpus, kChangelog, fmap.map, payloads, options);

  REQUIRE(plan.applied.size() == 1);
  CHECK(plan.applied[0].outcome == FileOutcome::reverted);
  CHECK(plan.applied[0].note.find("validation failed") == 0);
  CHECK(tc.bytes("projects/byop/07-guard-rails.md") == before);
}

TEST_CASE("run_sync honors scope for modules but not context files") {
  TempCorpus tc("sync-scope");
  Corpus corpus = tc.load();
  FeatureMap fmap;

  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::forge, 5, "Step: Extra\n"),
      make_module_payload(PathId::canvas, 5, "Step: Extra\n"),
      make_context_payload("hooks.md", "scoped run, context still lands\n"),
  };
  SyncOptions options{"2.12.0", "2.25.0", PathId::canvas, false};

  const std::string forge_before = tc.bytes("projects/forge/05-hooks.md");
  auto plan = run_sync(corpus, kChangelog, fmap, payloads, options);

  REQUIRE(plan.applied.size() == 3);
  CHECK(plan.applied[0].file == "projects/forge/05-hooks.md");
  CHECK(plan.applied[0].outcome == FileOutcome::unchanged);
  CHECK(plan.applied[0].note == "out of scope");
  CHECK(plan.applied[1].file == "projects/canvas/05-hooks.md");
  CHECK(plan.applied[1].outcome == FileOutcome::updated);
  CHECK(plan.applied[2].file == "context/hooks.md");
  CHECK(plan.applied[2].outcome == FileOutcome::updated);
  CHECK(tc.bytes("projects/forge/05-hooks.md") == forge_before);
}

TEST_CASE("dry runs plan without writing or locking") {
  TempCorpus tc("sync-dry");
  Corpus corpus = tc.load();
  FeatureMap fmap;
  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::nexus, 2, "Step: Planned only\n"),
      make_context_payload("plan-mode.md", "would replace\n"),
  };
  SyncOptions options{"2.12.0", "2.25.0", std::nullopt, true};

  const std::string module_before = tc.bytes("projects/nexus/02-blueprint.md");
  const std::string context_before = tc.bytes("context/plan-mode.md");

  FileLock::Status status = FileLock::Status::error;
  auto held = FileLock::for_target(tc.root / ".sync",
                                   std::chrono::seconds(60), status);
  REQUIRE(status == FileLock::Status::acquired);

  auto plan = run_sync(corpus, kChangelog, fmap, payloads, options);
  REQUIRE(plan.applied.size() == 2);
  CHECK(plan.applied[0].outcome == FileOutcome::updated);
  CHECK(plan.applied[1].outcome == FileOutcome::updated);
  CHECK(tc.bytes("projects/nexus/02-blueprint.md") == module_before);
  CHECK(tc.bytes("context/plan-mode.md") == context_before);
}

TEST_CASE("a live corpus lock turns concurrent syncs away") {
  TempCorpus tc("sync-lock");
  Corpus corpus = tc.load();
  FeatureMap fmap;
  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::forge, 5, "Step: Extra\n")};
  SyncOptions options{"2.12.0", "2.25.0", std::nullopt, false};

  FileLock::Status status = FileLock::Status::error;
  auto held = FileLock::for_target(tc.root / ".sync",
                                   std::chrono::seconds(60), status);
  REQUIRE(status == FileLock::Status::acquired);

  CHECK_THROWS_AS(run_sync(corpus, kChangelog, fmap, payloads, options),
                  SyncLockedError);
  held.release();
  auto plan = run_sync(corpus, kChangelog, fmap, payloads, options);
  CHECK(plan.applied[0].outcome == FileOutcome::updated);
}

TEST_CASE("no version gap short-circuits the whole pipeline") {
  TempCorpus tc("sync-nogap");
  Corpus corpus = tc.load();
  FeatureMap fmap;
  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::forge, 5, "Step: Extra\n")};
  SyncOptions options{"2.25.0", "2.25.0", std::nullopt, false};

  auto plan = run_sync(corpus, "not even a changelog", fmap, payloads,
                       options);
  CHECK_FALSE(plan.gap);
  CHECK(plan.entries.empty());
  CHECK(plan.applied.empty());
}

TEST_CASE("context replacements must be non-empty and skip identical bytes") {
  TempCorpus tc("sync-context");
  Corpus corpus = tc.load();
  FeatureMap fmap;
  const std::string same = tc.bytes("context/tdd.md");
  std::vector<UpdatePayload> payloads = {
      make_context_payload("guard-rails.md", "  \n"),
      make_context_payload("tdd.md", same),
  };
  SyncOptions options{"2.12.0", "2.25.0", std::nullopt, false};

  auto plan = run_sync(corpus, kChangelog, fmap, payloads, options);
  REQUIRE(plan.applied.size() == 2);
  CHECK(plan.applied[0].file == "context/guard-rails.md");
  CHECK(plan.applied[0].outcome == FileOutcome::reverted);
  CHECK(plan.applied[0].note == "replacement is empty");
  CHECK(plan.applied[1].file == "context/tdd.md");
  CHECK(plan.applied[1].outcome == FileOutcome::unchanged);
}

TEST_CASE("payloads for unloaded modules are reported, not applied") {
  TempCorpus tc("sync-missing");
  fs::remove(tc.root / "projects/forge/05-hooks.md");
  auto loaded = load_corpus(tc.root);
  FeatureMap fmap;
  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::forge, 5, "Step: Extra\n")};
  SyncOptions options{"2.12.0", "2.25.0", std::nullopt, false};

  auto plan = run_sync(loaded.corpus, kChangelog, fmap, payloads, options);
  REQUIRE(plan.applied.size() == 1);
  CHECK(plan.applied[0].outcome == FileOutcome::unchanged);
  CHECK(plan.applied[0].note == "target module not loaded");
}

TEST_CASE("machine plan rendering is stable and line oriented") {
  TempCorpus tc("sync-render");
  Corpus corpus = tc.load();
  auto fmap = parse_feature_map("hooks -> modules: 5\n");
  std::vector<UpdatePayload> payloads = {
      make_module_payload(PathId::forge, 5, "Step: Extra\n")};
  SyncOptions options{"2.12.0", "2.25.0", std::nullopt, true};

  auto plan = run_sync(corpus, kChangelog, fmap.map, payloads, options);
  auto text = render_plan_machine(plan);
  CHECK(text.find("gap\t2.12.0\t2.25.0\tyes\n") == 0);
  CHECK(text.find("entry\t2.25.0\tadded\tSandboxed bash execution for hooks") !=
        std::string::npos);
  CHECK(text.find("target\tSandboxed bash execution for hooks\tmodules=5") !=
        std::string::npos);
  CHECK(text.find("unmapped\tMCP server scopes now default to project") !=
        std::string::npos);
  CHECK(text.find("file\tprojects/forge/05-hooks.md\tupdated") !=
        std::string::npos);
  CHECK(text.find("summary\tupdated=1\treverted=0\tunchanged=0\n") !=
        std::string::npos);
}
