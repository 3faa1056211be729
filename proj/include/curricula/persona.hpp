#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curricula/corpus.hpp"

namespace curricula {

enum class ExperienceLevel { beginner = 0, intermediate = 1, advanced = 2 };

constexpr std::array<ExperienceLevel, 3> kAllLevels = {
    ExperienceLevel::beginner, ExperienceLevel::intermediate,
    ExperienceLevel::advanced};

std::string_view to_string(ExperienceLevel level);
std::optional<ExperienceLevel> level_from_string(std::string_view s);

// Inclusive module range; lo > hi means the stage is unused at that level.
struct StageRange {
  int lo = 0;
  int hi = -1;
  bool contains(int module) const { return module >= lo && module <= hi; }
  bool empty() const { return lo > hi; }
};

// One inclusive range per persona stage, per level. Well-formed schedules
// partition modules 1..10; the validator checks that.
struct PersonaSchedule {
  std::map<ExperienceLevel, std::array<StageRange, 4>> table;
};

// Built-in schedule: beginner 4/3/2/1, intermediate 3/3/3/1, advanced 1/3/5/1.
const PersonaSchedule& builtin_schedule();

// Unique stage whose range contains module. Throws std::out_of_range when
// module is outside 1..10 or the schedule leaves it uncovered.
Persona persona_for(const PersonaSchedule& schedule, ExperienceLevel level,
                    int module);

struct EffectiveLevel {
  ExperienceLevel declared = ExperienceLevel::beginner;
  ExperienceLevel current = ExperienceLevel::beginner;
};

enum class Direction { up, down, hold };

std::string_view to_string(Direction d);

// Moves current one notch, clamped at the ends. declared never changes.
EffectiveLevel shift_level(EffectiveLevel level, Direction direction);

// Override file format, one level per line:
//   beginner: guide=1-4, collaborator=5-7, peer=8-9, launcher=10
// '#' starts a comment. A single module may stand for a one-module range.
// Levels absent from the file fall back to the built-in schedule and are
// reported in errors so callers can decide whether that is acceptable.
struct ScheduleParseResult {
  PersonaSchedule schedule;
  std::vector<std::string> errors;
};

ScheduleParseResult parse_schedule_file(std::string_view text);

}  // namespace curricula
