#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "curricula/engagement.hpp"
#include "curricula/persona.hpp"

namespace curricula {

enum class Tier { encourage, redirect, structure };

std::string_view to_string(Tier t);

// encourage at ratio >= 0.7, redirect in [0.4, 0.7), structure below 0.4.
Tier tier_for_ratio(double ratio);

enum class StreakAlert { struggle, flow };

std::string_view to_string(StreakAlert a);

// The two alert directives are fixed wording; hosts key off them.
inline constexpr std::string_view kStruggleAlert = "Offer more scaffolding NOW";
inline constexpr std::string_view kFlowAlert =
    "Student is in flow. Match with deeper content.";

struct NoteTemplates {
  std::string body =
      "Engagement trend: {trend}. Dominant pattern: {pattern}. "
      "Directive: {directive}";
  std::string encourage_directive =
      "encourage curiosity and deeper exploration.";
  std::string redirect_directive =
      "redirect answer-seeking behavior with guiding questions.";
  std::string structure_directive =
      "provide additional structure and scaffolding.";
  std::string alert_prefix = " PRIORITY: ";
};

struct TeachingNote {
  Trend trend = Trend::stable;
  Category dominant_pattern = Category::neutral;
  Tier tier = Tier::redirect;
  std::optional<StreakAlert> streak_alert;
  std::string rendered;
};

// Session-start note. None until five non-neutral lifetime interactions.
// Ratio is productive over non-neutral lifetime counts. At most one alert;
// struggle wins if stale data carries both flags.
std::optional<TeachingNote> make_note(const LearnerProfile& profile,
                                      const NoteTemplates& templates = {});

struct BoundaryDecision {
  Direction direction = Direction::hold;
  double module_average = 0.0;
  double productive_share = 0.0;
  double unproductive_share = 0.0;
};

// Module-boundary rule: up at average >= 3.8 with productive share > 0.6;
// down at average <= 2.0 with unproductive share > 0.5; otherwise hold. The
// average is over all module interactions, the shares over non-neutral ones.
// A module with no non-neutral interactions always holds.
BoundaryDecision decide_boundary(const LearnerProfile& profile);

struct BoundaryOutcome {
  LearnerProfile profile;
  EffectiveLevel level;
  BoundaryDecision decision;
};

// Applies the decision: shifts the effective level one notch at most, resets
// module counters, advances module_id. Lifetime counts, window, streaks, and
// recent scores persist. The declared level is never touched.
BoundaryOutcome apply_boundary(const LearnerProfile& profile,
                               const EffectiveLevel& level,
                               std::string now_iso = {});

}  // namespace curricula
