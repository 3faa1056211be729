#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "curricula/persona.hpp"
#include "curricula/validator.hpp"

// Synthetic 50-file curriculum corpus used across the test suites: ten
// modules per project path, identical feature sets per module number, plus
// a populated context/ directory. Layout mirrors the shipped curriculum.
namespace fixtures {

const std::array<std::string, 10>& module_titles();
const std::array<std::vector<std::string>, 10>& module_features();
int step_count(int number);

// Canonical text of one clean module file.
std::string module_text(curricula::PathId path, int number);

const std::vector<std::string>& context_names();

// Writes projects/<path>/*.md for all five paths and context/*.md.
void write_clean_corpus(const std::filesystem::path& root);

std::filesystem::path make_temp_dir(const std::string& tag);

// File-level corpus mutations, each seeding exactly one violation of a
// distinct rule. Applied to a clean corpus on disk.
enum class Mutation {
  missing_module,      // delete forge/05
  extra_file,          // stray markdown in nexus/
  h1_mismatch,         // canvas/03 claims module 4
  persona_mismatch,    // sentinel/05 carries Peer
  missing_persona,     // canvas/06 loses its persona line
  missing_features,    // nexus/02 loses its features line
  step_gap,            // byop/07 renumbers 7.2 to 7.5
  missing_checkpoint,  // forge/09 loses the checkpoint section
  parity_break,        // canvas/10 gains an extra feature
  empty_context,       // context/hooks.md truncated
};

constexpr std::array<Mutation, 10> kAllMutations = {
    Mutation::missing_module,   Mutation::extra_file,
    Mutation::h1_mismatch,      Mutation::persona_mismatch,
    Mutation::missing_persona,  Mutation::missing_features,
    Mutation::step_gap,         Mutation::missing_checkpoint,
    Mutation::parity_break,     Mutation::empty_context,
};

struct SeededViolation {
  curricula::RuleId rule;
  std::string file;  // corpus-relative file the mutation touched
};

SeededViolation seed_mutation(const std::filesystem::path& root, Mutation m);

// Schedule-level mutations for the two schedule rules.
curricula::PersonaSchedule gap_schedule();         // beginner module 5 uncovered
curricula::PersonaSchedule regression_schedule();  // stage drops at module 8

}  // namespace fixtures
