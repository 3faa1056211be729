#include "curricula/persona.hpp"

#include <cctype>
#include <stdexcept>

#include "curricula/text_util.hpp"

namespace curricula {
namespace {

constexpr std::array<std::string_view, 3> kLevelNames = {
    "beginner", "intermediate", "advanced"};

PersonaSchedule make_builtin() {
  PersonaSchedule s;
  s.table[ExperienceLevel::beginner] = {
      StageRange{1, 4}, StageRange{5, 7}, StageRange{8, 9}, StageRange{10, 10}};
  s.table[ExperienceLevel::intermediate] = {
      StageRange{1, 3}, StageRange{4, 6}, StageRange{7, 9}, StageRange{10, 10}};
  s.table[ExperienceLevel::advanced] = {
      StageRange{1, 1}, StageRange{2, 4}, StageRange{5, 9}, StageRange{10, 10}};
  return s;
}

}  // namespace

std::string_view to_string(ExperienceLevel level) {
  return kLevelNames[static_cast<std::size_t>(level)];
}

std::optional<ExperienceLevel> level_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kLevelNames.size(); ++i) {
    if (normalize_phrase(s) == kLevelNames[i]) return static_cast<ExperienceLevel>(i);
  }
  return std::nullopt;
}

const PersonaSchedule& builtin_schedule() {
  static const PersonaSchedule schedule = make_builtin();
  return schedule;
}

Persona persona_for(const PersonaSchedule& schedule, ExperienceLevel level,
                    int module) {
  if (module < 1 || module > kModuleCount) {
    throw std::out_of_range("module out of range: " + std::to_string(module));
  }
  auto it = schedule.table.find(level);
  if (it == schedule.table.end()) {
    throw std::out_of_range("no schedule for level " +
                            std::string(to_string(level)));
  }
  for (Persona p : kAllPersonas) {
    if (it->second[static_cast<std::size_t>(p)].contains(module)) return p;
  }
  throw std::out_of_range("no persona covers module " + std::to_string(module));
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::hold: return "hold";
  }
  return "hold";
}

EffectiveLevel shift_level(EffectiveLevel level, Direction direction) {
  int cur = static_cast<int>(level.current);
  if (direction == Direction::up) ++cur;
  if (direction == Direction::down) --cur;
  if (cur < 0) cur = 0;
  if (cur > 2) cur = 2;
  level.current = static_cast<ExperienceLevel>(cur);
  return level;
}

namespace {

std::optional<Persona> persona_key_from_string(std::string_view s) {
  for (Persona p : kAllPersonas) {
    if (normalize_phrase(s) == to_lower(to_string(p))) return p;
  }
  return std::nullopt;
}

std::optional<StageRange> parse_range(std::string_view s) {
  auto t = trim(s);
  std::size_t dash = t.find('-');
  auto to_int = [](std::string_view piece) -> std::optional<int> {
    auto p = trim(piece);
    if (p.empty()) return std::nullopt;
    for (char c : p)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    return std::stoi(std::string(p));
  };
  if (dash == std::string_view::npos) {
    auto one = to_int(t);
    if (!one) return std::nullopt;
    return StageRange{*one, *one};
  }
  auto lo = to_int(t.substr(0, dash));
  auto hi = to_int(t.substr(dash + 1));
  if (!lo || !hi) return std::nullopt;
  return StageRange{*lo, *hi};
}

}  // namespace

ScheduleParseResult parse_schedule_file(std::string_view text) {
  ScheduleParseResult result;
  result.schedule = builtin_schedule();
  std::array<bool, 3> seen = {false, false, false};

  int lineno = 0;
  for (const Line& ln : split_lines(text)) {
    lineno = ln.number;
    auto t = trim(ln.text);
    if (t.empty() || t.front() == '#') continue;
    std::size_t colon = t.find(':');
    if (colon == std::string_view::npos) {
      result.errors.push_back("line " + std::to_string(lineno) +
                              ": expected 'level: stage=range, ...'");
      continue;
    }
    auto level = level_from_string(t.substr(0, colon));
    if (!level) {
      result.errors.push_back("line " + std::to_string(lineno) +
                              ": unknown level '" +
                              std::string(trim(t.substr(0, colon))) + "'");
      continue;
    }
    if (seen[static_cast<std::size_t>(*level)]) {
      result.errors.push_back("line " + std::to_string(lineno) +
                              ": duplicate level '" +
                              std::string(to_string(*level)) + "'");
      continue;
    }
    seen[static_cast<std::size_t>(*level)] = true;
    std::array<StageRange, 4> ranges = {StageRange{}, StageRange{},
                                        StageRange{}, StageRange{}};
    std::array<bool, 4> assigned = {false, false, false, false};
    std::string_view rest = t.substr(colon + 1);
    std::size_t pos = 0;
    bool line_ok = true;
    while (pos <= rest.size()) {
      std::size_t comma = rest.find(',', pos);
      std::string_view piece = (comma == std::string_view::npos)
                                   ? rest.substr(pos)
                                   : rest.substr(pos, comma - pos);
      auto pt = trim(piece);
      if (!pt.empty()) {
        std::size_t eq = pt.find('=');
        std::optional<Persona> persona;
        std::optional<StageRange> range;
        if (eq != std::string_view::npos) {
          persona = persona_key_from_string(pt.substr(0, eq));
          range = parse_range(pt.substr(eq + 1));
        }
        if (!persona || !range) {
          result.errors.push_back("line " + std::to_string(lineno) +
                                  ": bad assignment '" + std::string(pt) + "'");
          line_ok = false;
        } else if (assigned[static_cast<std::size_t>(*persona)]) {
          result.errors.push_back("line " + std::to_string(lineno) +
                                  ": duplicate stage '" +
                                  std::string(to_string(*persona)) + "'");
          line_ok = false;
        } else {
          assigned[static_cast<std::size_t>(*persona)] = true;
          ranges[static_cast<std::size_t>(*persona)] = *range;
        }
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (line_ok) result.schedule.table[*level] = ranges;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      result.errors.push_back("no schedule for level '" +
                              std::string(kLevelNames[i]) +
                              "'; built-in values kept");
    }
  }
  return result;
}

}  // namespace curricula
