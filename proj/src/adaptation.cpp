#include "curricula/adaptation.hpp"

#include "curricula/text_util.hpp"

namespace curricula {
namespace {

void replace_all(std::string& text, std::string_view what,
                 std::string_view with) {
  std::size_t pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
}

}  // namespace

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::encourage: return "encourage";
    case Tier::redirect: return "redirect";
    case Tier::structure: return "structure";
  }
  return "redirect";
}

Tier tier_for_ratio(double ratio) {
  if (ratio >= 0.7) return Tier::encourage;
  if (ratio >= 0.4) return Tier::redirect;
  return Tier::structure;
}

std::string_view to_string(StreakAlert a) {
  return a == StreakAlert::struggle ? "struggle" : "flow";
}

std::optional<TeachingNote> make_note(const LearnerProfile& profile,
                                      const NoteTemplates& templates) {
  const std::int64_t non_neutral = profile.lifetime_non_neutral();
  if (non_neutral < 5) return std::nullopt;

  TeachingNote note;
  note.trend = profile.trend;

  const double ratio =
      static_cast<double>(profile.lifetime_productive()) /
      static_cast<double>(non_neutral);
  note.tier = tier_for_ratio(ratio);

  // Most frequent non-neutral category; ties go to the higher score, then
  // to the earlier category in enum order.
  std::optional<Category> dominant;
  for (Category c : kAllCategories) {
    if (c == Category::neutral) continue;
    const auto count = profile.lifetime_counts[static_cast<std::size_t>(c)];
    if (count == 0) continue;
    if (!dominant) {
      dominant = c;
      continue;
    }
    const auto best = profile.lifetime_counts[static_cast<std::size_t>(*dominant)];
    if (count > best ||
        (count == best && score_of(c) > score_of(*dominant))) {
      dominant = c;
    }
  }
  note.dominant_pattern = dominant.value_or(Category::neutral);

  if (profile.struggle_streak) {
    note.streak_alert = StreakAlert::struggle;
  } else if (profile.engagement_streak) {
    note.streak_alert = StreakAlert::flow;
  }

  std::string directive;
  switch (note.tier) {
    case Tier::encourage: directive = templates.encourage_directive; break;
    case Tier::redirect: directive = templates.redirect_directive; break;
    case Tier::structure: directive = templates.structure_directive; break;
  }
  std::string rendered = templates.body;
  replace_all(rendered, "{trend}", to_string(note.trend));
  replace_all(rendered, "{pattern}", to_string(note.dominant_pattern));
  replace_all(rendered, "{directive}", directive);
  if (note.streak_alert) {
    rendered += templates.alert_prefix;
    rendered += *note.streak_alert == StreakAlert::struggle ? kStruggleAlert
                                                            : kFlowAlert;
  }
  note.rendered = std::move(rendered);
  return note;
}

BoundaryDecision decide_boundary(const LearnerProfile& profile) {
  BoundaryDecision d;
  const std::int64_t total = profile.module_total();
  const std::int64_t non_neutral = profile.module_non_neutral();
  if (total > 0) {
    d.module_average = profile.module_quality_sum / static_cast<double>(total);
  }
  if (non_neutral == 0) return d;  // hold
  d.productive_share = static_cast<double>(profile.module_productive()) /
                       static_cast<double>(non_neutral);
  d.unproductive_share = static_cast<double>(profile.module_unproductive()) /
                         static_cast<double>(non_neutral);
  if (d.module_average >= 3.8 && d.productive_share > 0.6) {
    d.direction = Direction::up;
  } else if (d.module_average <= 2.0 && d.unproductive_share > 0.5) {
    d.direction = Direction::down;
  }
  return d;
}

BoundaryOutcome apply_boundary(const LearnerProfile& profile,
                               const EffectiveLevel& level,
                               std::string now_iso) {
  BoundaryOutcome out;
  out.decision = decide_boundary(profile);
  out.level = shift_level(level, out.decision.direction);
  out.profile = profile;
  out.profile.module_counts.fill(0);
  out.profile.module_quality_sum = 0.0;
  if (out.profile.module_id < kModuleCount) ++out.profile.module_id;
  out.profile.last_updated = now_iso.empty() ? iso8601_now() : std::move(now_iso);
  return out;
}

}  // namespace curricula
