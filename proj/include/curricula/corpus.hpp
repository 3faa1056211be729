#ifndef CURRICULA_CORPUS_HPP
#define CURRICULA_CORPUS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curricula {

/// The five project paths. String forms are the lowercase directory names
/// under projects/.
enum class PathId { canvas, forge, nexus, sentinel, byop };

inline constexpr std::array<PathId, 5> kAllPaths = {
    PathId::canvas, PathId::forge, PathId::nexus, PathId::sentinel,
    PathId::byop};

std::string_view to_string(PathId id);
std::optional<PathId> path_from_string(std::string_view s);

/// Instructional stages, in scaffolding order (Guide is the most supported,
/// Launcher the most independent).
enum class Persona { Guide, Collaborator, Peer, Launcher };

inline constexpr std::array<Persona, 4> kAllPersonas = {
    Persona::Guide, Persona::Collaborator, Persona::Peer, Persona::Launcher};

std::string_view to_string(Persona p);
std::optional<Persona> persona_from_string(std::string_view s);

/// Position in the scaffolding order: Guide=0 .. Launcher=3.
int stage_order(Persona p);

inline constexpr int kModuleCount = 10;

/// Canonical module filename for a module number (1-based), e.g. "05-hooks.md".
std::string module_filename(int number);

/// Repository-relative module file path, e.g. "projects/forge/05-hooks.md".
std::string module_rel_path(PathId path, int number);

/// One numbered step inside a module. The label renders as
/// "<module_number>.<step_index>".
struct Step {
  int module_number = 0;
  int step_index = 0;
  std::string heading;
  std::string body;
  std::optional<std::string> stop_block;  // starts with the "**STOP" marker
  int line = 0;                           // 1-based line of the heading

  std::string label() const;
};

/// Parsed representation of one module file. Parsing is lossless: raw_text
/// holds the original bytes and serialize() returns them unchanged, so the
/// sync layer can edit files byte-exactly.
struct ModuleDoc {
  PathId path = PathId::canvas;
  int number = 0;                   // canonical number (filename position)
  std::optional<int> h1_number;     // number as written in the H1, if any
  std::string title;
  std::optional<Persona> persona;   // absent when the persona line is missing
                                    // or names no known stage
  std::optional<std::vector<std::string>> features;  // absent when the
                                                     // CC-features line is missing
  std::vector<Step> steps;
  std::vector<std::string> checkpoint_items;
  bool has_checkpoint = false;
  std::string raw_text;

  // Byte offset of the checkpoint heading's line start in raw_text; the
  // safe-append insertion point. -1 when there is no checkpoint.
  std::int64_t checkpoint_offset = -1;
  int h1_line = 0;         // 1-based; 0 = absent
  int persona_line = 0;
  int features_line = 0;
  int checkpoint_line = 0;
  int stop_count = 0;      // lines beginning with the STOP marker
};

std::string serialize(const ModuleDoc& doc);

enum class ParseCode {
  missing_h1,
  h1_number_mismatch,
  bad_persona_line,
  missing_features_line,
  step_numbering,
  missing_checkpoint,
};

std::string_view to_string(ParseCode code);

struct ParseError {
  ParseCode code;
  int line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  ModuleDoc doc;  // best-effort even when errors is non-empty
  std::vector<ParseError> errors;
};

/// Parses one module file. Never throws on malformed content: every defect
/// becomes a ParseError and the returned doc carries whatever was
/// recoverable.
ParseResult parse_module(std::string_view text, PathId path,
                         int expected_number);

struct Corpus {
  std::filesystem::path root;
  std::map<std::pair<PathId, int>, ModuleDoc> modules;
  std::vector<std::pair<std::string, std::uint64_t>> context_files;  // name, bytes
  std::vector<std::string> extra_files;  // repo-relative, non-canonical

  const ModuleDoc* find(PathId path, int number) const;
};

enum class LoadCode {
  missing_directory,
  missing_module_file,
  unexpected_file,
  unreadable_file,
};

std::string_view to_string(LoadCode code);

struct LoadIssue {
  LoadCode code;
  std::optional<PathId> path;
  std::optional<int> module;
  std::string file;  // repo-relative
  std::string message;
};

struct CorpusResult {
  Corpus corpus;
  std::vector<LoadIssue> issues;
  // Per-file parse errors, keyed by repo-relative path. Parse errors never
  // abort loading.
  std::map<std::string, std::vector<ParseError>> parse_errors;
};

/// Walks projects/<path>/ for the ten canonical module files and context/
/// for reference files. Missing or extra files are reported as issues; the
/// rest of the corpus still loads.
CorpusResult load_corpus(const std::filesystem::path& root);

}  // namespace curricula

#endif  // CURRICULA_CORPUS_HPP
