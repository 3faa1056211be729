#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curricula {

enum class Category {
  concept_question = 0,
  independent_exploration = 1,
  debug_attempt = 2,
  neutral = 3,
  answer_seeking = 4,
  passive_acceptance = 5,
};

inline constexpr int kCategoryCount = 6;

constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::concept_question, Category::independent_exploration,
    Category::debug_attempt,    Category::neutral,
    Category::answer_seeking,   Category::passive_acceptance,
};

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

// Fixed quality scores, 1 (unproductive) to 5 (highly productive).
int score_of(Category c);

bool is_productive(Category c);    // concept_question, independent_exploration, debug_attempt
bool is_unproductive(Category c);  // answer_seeking, passive_acceptance

// Streak groups. debug_attempt belongs to neither, so it breaks both streaks.
bool in_struggle_set(Category c);    // answer_seeking, passive_acceptance
bool in_engagement_set(Category c);  // concept_question, independent_exploration

struct Lexicon {
  std::vector<std::string> concept_question;
  std::vector<std::string> independent_exploration;
  std::vector<std::string> debug_attempt;
  std::vector<std::string> answer_seeking;
  int passive_short_max = 15;    // message shorter than this, in code points
  int assistant_long_min = 500;  // prior assistant turn at least this long

  static Lexicon defaults();
};

// Loads phrase lists from a JSON object {"concept_question": [...], ...,
// "passive_short_max": n, "assistant_long_min": n}; missing keys keep
// defaults. Returns nullopt when the text is not a JSON object.
std::optional<Lexicon> parse_lexicon(std::string_view text);

// Precedence: answer_seeking, then concept_question, independent_exploration,
// debug_attempt, then the short-reply test, then neutral. Substring matches,
// case-insensitive; lengths are UTF-8 code points.
Category classify(std::string_view message, std::size_t prior_assistant_length,
                  const Lexicon& lexicon);

enum class Trend { improving, stable, declining };

std::string_view to_string(Trend t);
std::optional<Trend> trend_from_string(std::string_view s);

// With fewer than 10 scores the trend is stable. Otherwise compares the mean
// of the last 5 against the 5 before them with a +/-0.5 band.
Trend compute_trend(const std::deque<int>& recent_scores);

struct LearnerProfile {
  int schema_version = 1;
  std::array<std::int64_t, kCategoryCount> lifetime_counts{};
  int module_id = 1;
  std::array<std::int64_t, kCategoryCount> module_counts{};
  double module_quality_sum = 0.0;
  std::deque<int> recent_scores;  // newest at back, max 10
  std::deque<Category> window;    // non-neutral only, newest at back, max 5
  bool struggle_streak = false;
  bool engagement_streak = false;
  Trend trend = Trend::stable;
  std::string last_updated;

  std::int64_t lifetime_non_neutral() const;
  std::int64_t lifetime_productive() const;
  std::int64_t lifetime_unproductive() const;
  std::int64_t module_total() const;
  std::int64_t module_non_neutral() const;
  std::int64_t module_productive() const;
  std::int64_t module_unproductive() const;
};

// Pure fold step. now_iso stamps last_updated; empty means "use wall clock".
LearnerProfile update_profile(const LearnerProfile& profile, Category category,
                              std::string now_iso = {});

std::string profile_to_json(const LearnerProfile& profile);
// Malformed or wrong-schema input yields nullopt; callers reinitialize.
std::optional<LearnerProfile> profile_from_json(std::string_view text);

// Load-or-initialize: absent or corrupt file gives a fresh profile.
LearnerProfile load_profile(const std::filesystem::path& path);
bool save_profile(const std::filesystem::path& path,
                  const LearnerProfile& profile);

enum class ObserveStatus {
  applied,
  skipped_lock,
  skipped_transcript,
  skipped_empty,
  failed_io,
};

std::string_view to_string(ObserveStatus s);

// Reads the transcript (one JSON object per line, fields role/content),
// classifies the last user message against the length of the assistant turn
// preceding it, and folds the result into the profile under a lock on the
// profile path. Never throws; the CLI maps every status to exit 0.
ObserveStatus observe(const std::filesystem::path& transcript_path,
                      const std::filesystem::path& profile_path,
                      const Lexicon& lexicon,
                      std::chrono::seconds lock_stale_after =
                          std::chrono::seconds(10));

}  // namespace curricula
