#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curricula/corpus.hpp"
#include "curricula/version.hpp"

namespace curricula {

struct VersionRange {
  Version from_excl;  // last synced version, excluded
  Version to_incl;    // latest version, included
  bool contains(const Version& v) const {
    return from_excl < v && v <= to_incl;
  }
};

// Nullopt when current >= latest (nothing to do, downgrades included).
// Throws std::invalid_argument on versions that do not parse.
std::optional<VersionRange> detect_gap(std::string_view current,
                                       std::string_view latest);

enum class Section { added, changed, removed, fixed, other };

std::string_view to_string(Section s);

struct ChangelogEntry {
  Version version;
  Section section = Section::other;
  std::string text;
};

// Keep-a-changelog layout: "## [X.Y.Z]" version headings, "### Added" style
// section headings, "-" bullets. Returns in-gap bullets from the Added,
// Changed, and Removed sections; Fixed and unknown sections are dropped.
// Throws std::invalid_argument when no version heading is present.
std::vector<ChangelogEntry> triage(std::string_view changelog,
                                   const VersionRange& gap);

struct FeatureRule {
  std::string pattern;  // case-insensitive substring; "*" matches everything
  std::vector<int> modules;
  std::vector<std::string> context_files;
};

struct FeatureMap {
  std::vector<FeatureRule> rules;
};

struct FeatureMapParseResult {
  FeatureMap map;
  std::vector<std::string> errors;
};

// One rule per line: `pattern -> modules: 5,7; context: hooks.md`
// Either target list may be omitted. '#' starts a comment.
FeatureMapParseResult parse_feature_map(std::string_view text);

struct MappedEntry {
  ChangelogEntry entry;
  std::vector<int> modules;
  std::vector<std::string> context_files;
  bool unmapped = false;
};

// First matching rule wins; entries no rule matches land in the unmapped
// bucket rather than being dropped.
std::vector<MappedEntry> map_entries(const std::vector<ChangelogEntry>& entries,
                                     const FeatureMap& fmap);

struct ModuleTarget {
  PathId path;
  int module = 0;
};

struct UpdatePayload {
  std::optional<ModuleTarget> module_target;
  std::optional<std::string> context_target;  // context file name
  std::string content;
  std::optional<std::string> source_entry;
};

struct PayloadParseResult {
  std::optional<UpdatePayload> payload;
  std::string error;
};

// Payload file: header lines (`target: canvas/5` or `target: context/x.md`,
// optional `source: ...`), a `---` separator, then content. Module content
// is one or more `Step: <heading>` blocks; step numbers are assigned at
// apply time, never written in the payload.
PayloadParseResult parse_payload(std::string_view text);

enum class ApplyErrorCode { wrong_target, no_checkpoint };

struct ApplyError {
  ApplyErrorCode code;
  std::string message;
};

// Safe append: renders the payload's steps as k+1, k+2, ... and inserts them
// immediately before the Checkpoint heading. Bytes before the insertion
// point are untouched. Empty content returns the document unchanged.
std::variant<ModuleDoc, ApplyError> apply_update(const ModuleDoc& doc,
                                                 const UpdatePayload& payload);

enum class FileOutcome { updated, reverted, unchanged };

std::string_view to_string(FileOutcome o);

struct AppliedFile {
  std::string file;  // corpus-relative
  FileOutcome outcome = FileOutcome::unchanged;
  std::string note;
};

struct SyncPlan {
  std::string from_version;
  std::string to_version;
  bool gap = false;
  std::vector<ChangelogEntry> entries;
  std::vector<MappedEntry> targets;
  std::vector<AppliedFile> applied;
};

struct SyncOptions {
  std::string current;
  std::string latest;
  std::optional<PathId> scope;  // nullopt = all five paths
  bool dry_run = false;
};

// Another sync holds the corpus lock.
class SyncLockedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full pipeline: gap, triage, mapping, then per-file apply+verify+write.
// A file whose post-apply validation fails is left byte-identical to its
// pre-sync state and recorded as reverted. Module payloads outside scope are
// recorded as unchanged; context payloads ignore scope. Dry runs produce the
// same plan without writing or locking.
SyncPlan run_sync(const Corpus& corpus, std::string_view changelog,
                  const FeatureMap& fmap,
                  const std::vector<UpdatePayload>& payloads,
                  const SyncOptions& options);

std::string render_plan_machine(const SyncPlan& plan);
std::string render_plan_text(const SyncPlan& plan);

}  // namespace curricula
