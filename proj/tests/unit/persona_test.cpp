#include <doctest.h>

#include <stdexcept>

#include "curricula/persona.hpp"
#include "support/fixture_corpus.hpp"
#include "support/schedule_oracle.hpp"

using namespace curricula;

TEST_CASE("all thirty level and module combinations resolve per the table") {
  const PersonaSchedule& schedule = builtin_schedule();
  for (const auto& c : fixtures::kScheduleOracle) {
    CAPTURE(to_string(c.level));
    CAPTURE(c.module);
    CHECK(persona_for(schedule, c.level, c.module) == c.persona);
  }
}

TEST_CASE("stage order never decreases as modules advance") {
  const PersonaSchedule& schedule = builtin_schedule();
  for (ExperienceLevel level : kAllLevels) {
    int prev = 0;
    for (int m = 1; m <= kModuleCount; ++m) {
      int cur = stage_order(persona_for(schedule, level, m));
      CHECK(cur >= prev);
      prev = cur;
    }
    CHECK(prev == stage_order(Persona::Launcher));
  }
}

TEST_CASE("higher declared levels never get more scaffolding") {
  const PersonaSchedule& schedule = builtin_schedule();
  for (int m = 1; m <= kModuleCount; ++m) {
    int beginner =
        stage_order(persona_for(schedule, ExperienceLevel::beginner, m));
    int inter =
        stage_order(persona_for(schedule, ExperienceLevel::intermediate, m));
    int adv = stage_order(persona_for(schedule, ExperienceLevel::advanced, m));
    CHECK(beginner <= inter);
    CHECK(inter <= adv);
  }
}

TEST_CASE("out-of-range and uncovered modules throw") {
  const PersonaSchedule& schedule = builtin_schedule();
  CHECK_THROWS_AS(persona_for(schedule, ExperienceLevel::beginner, 0),
                  std::out_of_range);
  CHECK_THROWS_AS(persona_for(schedule, ExperienceLevel::advanced, 11),
                  std::out_of_range);
  CHECK_THROWS_AS(persona_for(schedule, ExperienceLevel::beginner, -3),
                  std::out_of_range);

  auto gappy = fixtures::gap_schedule();
  CHECK_THROWS_AS(persona_for(gappy, ExperienceLevel::beginner, 5),
                  std::out_of_range);
  CHECK(persona_for(gappy, ExperienceLevel::beginner, 6) ==
        Persona::Collaborator);

  PersonaSchedule empty;
  CHECK_THROWS_AS(persona_for(empty, ExperienceLevel::beginner, 1),
                  std::out_of_range);
}

TEST_CASE("level names round trip and tolerate case") {
  for (ExperienceLevel level : kAllLevels) {
    CHECK(level_from_string(to_string(level)) == level);
  }
  CHECK(level_from_string("Beginner") == ExperienceLevel::beginner);
  CHECK(level_from_string("  ADVANCED ") == ExperienceLevel::advanced);
  CHECK_FALSE(level_from_string("expert").has_value());
}

TEST_CASE("shift moves current one notch and clamps at the ends") {
  EffectiveLevel level{ExperienceLevel::beginner, ExperienceLevel::beginner};

  level = shift_level(level, Direction::up);
  CHECK(level.current == ExperienceLevel::intermediate);
  level = shift_level(level, Direction::up);
  CHECK(level.current == ExperienceLevel::advanced);
  level = shift_level(level, Direction::up);
  CHECK(level.current == ExperienceLevel::advanced);

  level = shift_level(level, Direction::hold);
  CHECK(level.current == ExperienceLevel::advanced);

  level = shift_level(level, Direction::down);
  CHECK(level.current == ExperienceLevel::intermediate);
  level = shift_level(level, Direction::down);
  CHECK(level.current == ExperienceLevel::beginner);
  level = shift_level(level, Direction::down);
  CHECK(level.current == ExperienceLevel::beginner);

  CHECK(level.declared == ExperienceLevel::beginner);

  EffectiveLevel adv{ExperienceLevel::advanced, ExperienceLevel::beginner};
  adv = shift_level(adv, Direction::up);
  CHECK(adv.declared == ExperienceLevel::advanced);
  CHECK(adv.current == ExperienceLevel::intermediate);
}

TEST_CASE("schedule files override individual levels") {
  auto result = parse_schedule_file(
      "# custom pacing\n"
      "beginner: guide=1-6, collaborator=7-8, peer=9, launcher=10\n"
      "intermediate: guide=1-3, collaborator=4-6, peer=7-9, launcher=10\n"
      "advanced: guide=1, collaborator=2-4, peer=5-9, launcher=10\n");
  CHECK(result.errors.empty());
  CHECK(persona_for(result.schedule, ExperienceLevel::beginner, 6) ==
        Persona::Guide);
  CHECK(persona_for(result.schedule, ExperienceLevel::beginner, 9) ==
        Persona::Peer);
  CHECK(persona_for(result.schedule, ExperienceLevel::advanced, 5) ==
        Persona::Peer);
}

TEST_CASE("missing levels fall back to built-in values with a notice") {
  auto result = parse_schedule_file(
      "beginner: guide=1-5, collaborator=6-7, peer=8-9, launcher=10\n");
  REQUIRE(result.errors.size() == 2);
  CHECK(persona_for(result.schedule, ExperienceLevel::beginner, 5) ==
        Persona::Guide);
  CHECK(persona_for(result.schedule, ExperienceLevel::intermediate, 5) ==
        Persona::Collaborator);
  CHECK(persona_for(result.schedule, ExperienceLevel::advanced, 5) ==
        Persona::Peer);
}

TEST_CASE("malformed schedule lines are reported") {
  SUBCASE("unknown level name") {
    auto r = parse_schedule_file("wizard: guide=1-10\n");
    CHECK_FALSE(r.errors.empty());
  }
  SUBCASE("unknown stage name") {
    auto r = parse_schedule_file("beginner: mentor=1-10\n");
    CHECK_FALSE(r.errors.empty());
  }
  SUBCASE("backwards range") {
    auto r = parse_schedule_file(
        "beginner: guide=7-1, collaborator=8, peer=9, launcher=10\n");
    CHECK_FALSE(r.errors.empty());
  }
  SUBCASE("duplicate level line") {
    auto r = parse_schedule_file(
        "beginner: guide=1-9, launcher=10\n"
        "beginner: guide=1-8, launcher=9\n");
    CHECK_FALSE(r.errors.empty());
  }
  SUBCASE("duplicate stage within a line") {
    auto r = parse_schedule_file("beginner: guide=1-4, guide=5-10\n");
    CHECK_FALSE(r.errors.empty());
  }
}

TEST_CASE("single module numbers read as one-module ranges") {
  auto result = parse_schedule_file(
      "beginner: guide=1-8, collaborator=9, peer=9, launcher=10\n");
  auto& ranges = result.schedule.table.at(ExperienceLevel::beginner);
  CHECK(ranges[1].lo == 9);
  CHECK(ranges[1].hi == 9);
}
