#pragma once

#include <array>

#include "curricula/persona.hpp"

// Hand-written (level, module) -> persona table covering all thirty
// combinations. Kept independent of PersonaSchedule so schedule arithmetic
// is checked against a flat enumeration, not against itself.
namespace fixtures {

struct ScheduleCase {
  curricula::ExperienceLevel level;
  int module;
  curricula::Persona persona;
};

inline constexpr std::array<ScheduleCase, 30> kScheduleOracle = {{
    {curricula::ExperienceLevel::beginner, 1, curricula::Persona::Guide},
    {curricula::ExperienceLevel::beginner, 2, curricula::Persona::Guide},
    {curricula::ExperienceLevel::beginner, 3, curricula::Persona::Guide},
    {curricula::ExperienceLevel::beginner, 4, curricula::Persona::Guide},
    {curricula::ExperienceLevel::beginner, 5, curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::beginner, 6, curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::beginner, 7, curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::beginner, 8, curricula::Persona::Peer},
    {curricula::ExperienceLevel::beginner, 9, curricula::Persona::Peer},
    {curricula::ExperienceLevel::beginner, 10, curricula::Persona::Launcher},
    {curricula::ExperienceLevel::intermediate, 1, curricula::Persona::Guide},
    {curricula::ExperienceLevel::intermediate, 2, curricula::Persona::Guide},
    {curricula::ExperienceLevel::intermediate, 3, curricula::Persona::Guide},
    {curricula::ExperienceLevel::intermediate, 4,
     curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::intermediate, 5,
     curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::intermediate, 6,
     curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::intermediate, 7, curricula::Persona::Peer},
    {curricula::ExperienceLevel::intermediate, 8, curricula::Persona::Peer},
    {curricula::ExperienceLevel::intermediate, 9, curricula::Persona::Peer},
    {curricula::ExperienceLevel::intermediate, 10,
     curricula::Persona::Launcher},
    {curricula::ExperienceLevel::advanced, 1, curricula::Persona::Guide},
    {curricula::ExperienceLevel::advanced, 2, curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::advanced, 3, curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::advanced, 4, curricula::Persona::Collaborator},
    {curricula::ExperienceLevel::advanced, 5, curricula::Persona::Peer},
    {curricula::ExperienceLevel::advanced, 6, curricula::Persona::Peer},
    {curricula::ExperienceLevel::advanced, 7, curricula::Persona::Peer},
    {curricula::ExperienceLevel::advanced, 8, curricula::Persona::Peer},
    {curricula::ExperienceLevel::advanced, 9, curricula::Persona::Peer},
    {curricula::ExperienceLevel::advanced, 10, curricula::Persona::Launcher},
}};

}  // namespace fixtures
