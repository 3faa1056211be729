#include "curricula/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "curricula/text_util.hpp"

namespace curricula {
namespace {

constexpr std::array<std::string_view, 5> kPathNames = {
    "canvas", "forge", "nexus", "sentinel", "byop"};

constexpr std::array<std::string_view, 4> kPersonaNames = {
    "Guide", "Collaborator", "Peer", "Launcher"};

constexpr std::array<std::string_view, 10> kModuleFilenames = {
    "01-setup.md",
    "02-blueprint.md",
    "03-rules-memory-context.md",
    "04-skills-commands.md",
    "05-hooks.md",
    "06-mcp-servers.md",
    "07-guard-rails.md",
    "08-subagents.md",
    "09-tasks-tdd.md",
    "10-parallel-plugins-eval.md",
};

bool is_fence(std::string_view line) {
  auto t = trim(line);
  return t.substr(0, 3) == "```" || t.substr(0, 3) == "~~~";
}

struct AtxHeading {
  int level = 0;
  std::string_view text;  // after the #s and whitespace
};

std::optional<AtxHeading> parse_atx(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] == '#') ++i;
  if (i == 0 || i > 6) return std::nullopt;
  if (i >= line.size() || (line[i] != ' ' && line[i] != '\t')) return std::nullopt;
  return AtxHeading{static_cast<int>(i), trim(line.substr(i))};
}

struct StepLabel {
  int module = 0;
  int index = 0;
  std::string_view rest;  // after the label and its delimiter
};

bool is_label_delim(char c) {
  return std::isspace(static_cast<unsigned char>(c)) ||
         std::ispunct(static_cast<unsigned char>(c));
}

// "<module>.<index>" followed by punctuation, whitespace, or end of text.
std::optional<StepLabel> parse_step_label(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0 || i >= s.size() || s[i] != '.') return std::nullopt;
  std::size_t j = i + 1;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
  if (j == i + 1) return std::nullopt;
  if (j < s.size() && !is_label_delim(s[j])) return std::nullopt;
  StepLabel out;
  out.module = std::stoi(std::string(s.substr(0, i)));
  out.index = std::stoi(std::string(s.substr(i + 1, j - i - 1)));
  // Skip the delimiter run so the heading text starts clean.
  while (j < s.size() && (s[j] == '.' || s[j] == ':' || s[j] == ')' ||
                          s[j] == '-' || s[j] == ' ' || s[j] == '\t'))
    ++j;
  out.rest = s.substr(j);
  return out;
}

struct H1Info {
  int number = 0;
  std::string title;
};

// "# Module <n>: <title>" (colon optional, keyword case-insensitive).
std::optional<H1Info> parse_h1_module(std::string_view text) {
  auto t = trim(text);
  if (!starts_with_icase(t, "module")) return std::nullopt;
  t = trim(t.substr(6));
  std::size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i == 0) return std::nullopt;
  H1Info info;
  info.number = std::stoi(std::string(t.substr(0, i)));
  auto rest = trim(t.substr(i));
  if (!rest.empty() && rest.front() == ':') rest = trim(rest.substr(1));
  info.title = std::string(rest);
  return info;
}

// Persona metadata line: bold text starting "Persona --" (two hyphens or an
// em dash), followed by a stage name. Both dash forms accepted.
std::optional<Persona> parse_persona_line(std::string_view line) {
  std::size_t at = line.find("**Persona");
  if (at == std::string_view::npos) return std::nullopt;
  std::string_view rest = line.substr(at + 9);
  rest = trim(rest);
  if (rest.substr(0, 2) == "--") {
    rest = rest.substr(2);
  } else if (rest.substr(0, 3) == "\xE2\x80\x94") {  // U+2014 em dash
    rest = rest.substr(3);
  } else {
    return std::nullopt;
  }
  rest = trim(rest);
  std::size_t n = 0;
  while (n < rest.size() && std::isalpha(static_cast<unsigned char>(rest[n]))) ++n;
  return persona_from_string(rest.substr(0, n));
}

// "**CC features:** a, b" or "**CC features**: a, b".
std::optional<std::string_view> parse_features_line(std::string_view line) {
  auto t = trim(line);
  if (!starts_with_icase(t, "**CC features")) return std::nullopt;
  t = t.substr(13);
  if (!t.empty() && t.front() == ':') t = t.substr(1);
  if (t.substr(0, 2) == "**") t = t.substr(2);
  if (!t.empty() && t.front() == ':') t = t.substr(1);
  return trim(t);
}

std::vector<std::string> split_features(std::string_view csv) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string_view piece = (comma == std::string_view::npos)
                                 ? csv.substr(pos)
                                 : csv.substr(pos, comma - pos);
    auto t = trim(piece);
    if (!t.empty()) out.emplace_back(t);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& p, bool& ok) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ok = in.good() || in.eof();
  return buf.str();
}

}  // namespace

std::string_view to_string(PathId id) {
  return kPathNames[static_cast<std::size_t>(id)];
}

std::optional<PathId> path_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kPathNames.size(); ++i) {
    if (s == kPathNames[i]) return static_cast<PathId>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Persona p) {
  return kPersonaNames[static_cast<std::size_t>(p)];
}

std::optional<Persona> persona_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kPersonaNames.size(); ++i) {
    if (starts_with_icase(s, kPersonaNames[i]) && s.size() == kPersonaNames[i].size())
      return static_cast<Persona>(i);
  }
  return std::nullopt;
}

int stage_order(Persona p) { return static_cast<int>(p); }

std::string module_filename(int number) {
  return std::string(kModuleFilenames.at(static_cast<std::size_t>(number - 1)));
}

std::string module_rel_path(PathId path, int number) {
  return "projects/" + std::string(to_string(path)) + "/" + module_filename(number);
}

std::string Step::label() const {
  return std::to_string(module_number) + "." + std::to_string(step_index);
}

std::string serialize(const ModuleDoc& doc) { return doc.raw_text; }

std::string_view to_string(ParseCode code) {
  switch (code) {
    case ParseCode::missing_h1: return "missing_h1";
    case ParseCode::h1_number_mismatch: return "h1_number_mismatch";
    case ParseCode::bad_persona_line: return "bad_persona_line";
    case ParseCode::missing_features_line: return "missing_features_line";
    case ParseCode::step_numbering: return "step_numbering";
    case ParseCode::missing_checkpoint: return "missing_checkpoint";
  }
  return "unknown";
}

ParseResult parse_module(std::string_view text, PathId path,
                         int expected_number) {
  ParseResult result;
  ModuleDoc& doc = result.doc;
  doc.path = path;
  doc.number = expected_number;
  doc.raw_text.assign(text);

  const auto lines = split_lines(text);

  // Step heading positions, as (line array index, label).
  struct StepEvent {
    std::size_t line_idx;
    StepLabel label;
    std::string heading;
  };
  std::vector<StepEvent> step_events;

  bool in_fence = false;
  std::size_t checkpoint_idx = lines.size();  // sentinel: none

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& ln = lines[i];
    if (is_fence(ln.text)) {
      in_fence = !in_fence;
      continue;
    }
    if (in_fence) continue;
    auto trimmed = trim(ln.text);

    if (trimmed.substr(0, 6) == "**STOP") ++doc.stop_count;

    if (auto atx = parse_atx(ln.text)) {
      if (atx->level == 1 && doc.h1_line == 0) {
        doc.h1_line = ln.number;
        if (auto h1 = parse_h1_module(atx->text)) {
          doc.h1_number = h1->number;
          doc.title = h1->title;
        }
      }
      if (doc.checkpoint_line == 0 && starts_with_icase(atx->text, "Checkpoint")) {
        doc.has_checkpoint = true;
        doc.checkpoint_line = ln.number;
        doc.checkpoint_offset = ln.offset;
        checkpoint_idx = i;
        continue;
      }
      if (checkpoint_idx == lines.size()) {
        if (auto label = parse_step_label(atx->text)) {
          std::string_view head = label->rest;
          step_events.push_back(StepEvent{i, *label, std::string(trim(head))});
          continue;
        }
      }
    }

    if (doc.persona_line == 0) {
      if (trimmed.find("**Persona") != std::string_view::npos) {
        doc.persona_line = ln.number;
        doc.persona = parse_persona_line(trimmed);
      }
    }
    if (doc.features_line == 0) {
      if (auto feats = parse_features_line(trimmed)) {
        doc.features_line = ln.number;
        doc.features = split_features(*feats);
      }
    }
    if (checkpoint_idx == lines.size() && trimmed.substr(0, 2) == "**") {
      if (auto label = parse_step_label(trimmed.substr(2))) {
        std::string_view head = label->rest;
        // Strip the closing bold marker from the heading text.
        if (auto close = head.rfind("**"); close != std::string_view::npos)
          head = head.substr(0, close);
        step_events.push_back(StepEvent{i, *label, std::string(trim(head))});
        continue;
      }
    }
  }

  // Checkpoint bullets on lines after the heading.
  if (checkpoint_idx < lines.size()) {
    bool fence = false;
    for (std::size_t i = checkpoint_idx + 1; i < lines.size(); ++i) {
      const auto& ln = lines[i];
      if (is_fence(ln.text)) {
        fence = !fence;
        continue;
      }
      if (fence) continue;
      auto t = trim(ln.text);
      if (t.substr(0, 2) == "- " || t.substr(0, 2) == "* ") {
        doc.checkpoint_items.emplace_back(trim(t.substr(2)));
      }
    }
  }

  // Slice step bodies: a step runs to the next step heading, the checkpoint,
  // or end of file. The first STOP paragraph in the range becomes stop_block.
  for (std::size_t s = 0; s < step_events.size(); ++s) {
    const auto& ev = step_events[s];
    std::size_t begin = ev.line_idx + 1;
    std::size_t end = (s + 1 < step_events.size()) ? step_events[s + 1].line_idx
                                                   : std::min(checkpoint_idx, lines.size());
    Step step;
    step.module_number = ev.label.module;
    step.step_index = ev.label.index;
    step.heading = ev.heading;
    step.line = lines[ev.line_idx].number;

    std::vector<std::string_view> body_lines;
    std::size_t i = begin;
    while (i < end) {
      auto t = trim(lines[i].text);
      if (!step.stop_block && t.substr(0, 6) == "**STOP") {
        std::string block(t);
        std::size_t j = i + 1;
        while (j < end && !trim(lines[j].text).empty() &&
               !parse_atx(lines[j].text) && !is_fence(lines[j].text)) {
          block += '\n';
          block += std::string(lines[j].text);
          ++j;
        }
        step.stop_block = std::move(block);
        i = j;
        continue;
      }
      body_lines.push_back(lines[i].text);
      ++i;
    }
    while (!body_lines.empty() && trim(body_lines.front()).empty())
      body_lines.erase(body_lines.begin());
    while (!body_lines.empty() && trim(body_lines.back()).empty())
      body_lines.pop_back();
    std::string body;
    for (std::size_t k = 0; k < body_lines.size(); ++k) {
      if (k) body += '\n';
      body += std::string(body_lines[k]);
    }
    step.body = std::move(body);
    doc.steps.push_back(std::move(step));
  }

  // Error reporting.
  auto add_error = [&](ParseCode code, int line, std::string message) {
    result.errors.push_back(ParseError{code, line, std::move(message)});
  };

  if (!doc.h1_number.has_value()) {
    add_error(ParseCode::missing_h1, doc.h1_line,
              "missing or malformed H1 module heading");
  } else if (*doc.h1_number != expected_number) {
    add_error(ParseCode::h1_number_mismatch, doc.h1_line,
              "H1 number " + std::to_string(*doc.h1_number) +
                  " does not match expected module " +
                  std::to_string(expected_number));
  }
  if (!doc.persona.has_value()) {
    add_error(ParseCode::bad_persona_line, doc.persona_line,
              doc.persona_line == 0 ? "missing persona line"
                                    : "unrecognized persona line");
  }
  if (!doc.features.has_value()) {
    add_error(ParseCode::missing_features_line, 0, "missing CC features line");
  }
  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    const Step& st = doc.steps[i];
    if (st.module_number != expected_number) {
      add_error(ParseCode::step_numbering, st.line,
                "step label " + st.label() + " does not match module " +
                    std::to_string(expected_number));
    } else if (st.step_index != static_cast<int>(i) + 1) {
      add_error(ParseCode::step_numbering, st.line,
                "non-contiguous step numbering at " + st.label());
    }
  }
  if (!doc.has_checkpoint) {
    add_error(ParseCode::missing_checkpoint,
              lines.empty() ? 0 : lines.back().number,
              "missing Checkpoint section");
  }
  return result;
}

const ModuleDoc* Corpus::find(PathId path, int number) const {
  auto it = modules.find({path, number});
  return it == modules.end() ? nullptr : &it->second;
}

std::string_view to_string(LoadCode code) {
  switch (code) {
    case LoadCode::missing_directory: return "missing_directory";
    case LoadCode::missing_module_file: return "missing_module_file";
    case LoadCode::unexpected_file: return "unexpected_file";
    case LoadCode::unreadable_file: return "unreadable_file";
  }
  return "unknown";
}

CorpusResult load_corpus(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  CorpusResult result;
  result.corpus.root = root;

  if (!fs::exists(root)) {
    result.issues.push_back(LoadIssue{LoadCode::missing_directory, std::nullopt,
                                      std::nullopt, root.string(),
                                      "corpus root does not exist"});
    return result;
  }

  for (PathId path : kAllPaths) {
    const std::string name(to_string(path));
    const fs::path dir = root / "projects" / name;
    if (!fs::is_directory(dir)) {
      result.issues.push_back(LoadIssue{LoadCode::missing_directory, path,
                                        std::nullopt, "projects/" + name,
                                        "missing project directory " + name});
      continue;
    }
    for (int number = 1; number <= kModuleCount; ++number) {
      const std::string rel = module_rel_path(path, number);
      const fs::path file = root / rel;
      if (!fs::exists(file)) {
        result.issues.push_back(
            LoadIssue{LoadCode::missing_module_file, path, number, rel,
                      "missing module file " + name + "/" + module_filename(number)});
        continue;
      }
      bool ok = true;
      std::string bytes = read_file(file, ok);
      if (!ok) {
        result.issues.push_back(LoadIssue{LoadCode::unreadable_file, path,
                                          number, rel, "unreadable file " + rel});
        continue;
      }
      ParseResult parsed = parse_module(bytes, path, number);
      if (!parsed.errors.empty()) {
        result.parse_errors[rel] = std::move(parsed.errors);
      }
      result.corpus.modules.emplace(std::make_pair(path, number),
                                    std::move(parsed.doc));
    }
    // Anything else markdown-shaped in the project directory is unexpected.
    // A project README is part of the documented layout and tolerated.
    std::vector<std::string> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      const std::string fname = e.path().filename().string();
      if (fname.empty() || fname.front() == '.') continue;
      if (fname == "README.md") continue;
      bool canonical = false;
      for (auto canon : kModuleFilenames) {
        if (fname == canon) {
          canonical = true;
          break;
        }
      }
      if (!canonical) entries.push_back(fname);
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& fname : entries) {
      const std::string rel = "projects/" + name + "/" + fname;
      result.corpus.extra_files.push_back(rel);
      result.issues.push_back(LoadIssue{LoadCode::unexpected_file, path,
                                        std::nullopt, rel,
                                        "unexpected file " + rel});
    }
  }

  const fs::path context_dir = root / "context";
  if (!fs::is_directory(context_dir)) {
    result.issues.push_back(LoadIssue{LoadCode::missing_directory, std::nullopt,
                                      std::nullopt, "context",
                                      "missing context directory"});
  } else {
    std::vector<std::pair<std::string, std::uint64_t>> ctx;
    for (const auto& e : fs::directory_iterator(context_dir)) {
      if (!e.is_regular_file()) continue;
      const std::string fname = e.path().filename().string();
      if (fname.empty() || fname.front() == '.') continue;
      ctx.emplace_back(fname, static_cast<std::uint64_t>(e.file_size()));
    }
    std::sort(ctx.begin(), ctx.end());
    result.corpus.context_files = std::move(ctx);
  }
  return result;
}

}  // namespace curricula
