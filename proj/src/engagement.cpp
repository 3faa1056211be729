#include "curricula/engagement.hpp"

#include <cassert>
#include <numeric>

#include <json.hpp>

#include "curricula/fs_util.hpp"
#include "curricula/text_util.hpp"

namespace curricula {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "concept_question", "independent_exploration", "debug_attempt",
    "neutral",          "answer_seeking",          "passive_acceptance",
};

constexpr std::array<int, kCategoryCount> kScores = {5, 4, 3, 3, 1, 1};

bool any_phrase_matches(std::string_view message,
                        const std::vector<std::string>& phrases) {
  for (const auto& phrase : phrases) {
    if (!phrase.empty() && contains_icase(message, phrase)) return true;
  }
  return false;
}

void read_phrases(const json& obj, const char* key,
                  std::vector<std::string>& into) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) return;
  into.clear();
  for (const auto& v : *it) {
    if (v.is_string()) into.push_back(v.get<std::string>());
  }
}

}  // namespace

std::string_view to_string(Category c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<Category> category_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (s == kCategoryNames[i]) return static_cast<Category>(i);
  }
  return std::nullopt;
}

int score_of(Category c) { return kScores[static_cast<std::size_t>(c)]; }

bool is_productive(Category c) {
  return c == Category::concept_question ||
         c == Category::independent_exploration || c == Category::debug_attempt;
}

bool is_unproductive(Category c) {
  return c == Category::answer_seeking || c == Category::passive_acceptance;
}

bool in_struggle_set(Category c) {
  return c == Category::answer_seeking || c == Category::passive_acceptance;
}

bool in_engagement_set(Category c) {
  return c == Category::concept_question ||
         c == Category::independent_exploration;
}

Lexicon Lexicon::defaults() {
  Lexicon lex;
  lex.concept_question = {"why does", "why do",  "why is",
                          "how does", "how do",  "how is",
                          "explain"};
  lex.independent_exploration = {"i tried", "i noticed", "i figured",
                                 "i experimented", "i discovered"};
  lex.debug_attempt = {"error",        "not working", "doesn't work",
                       "does not work", "isn't working", "stack trace",
                       "exception"};
  lex.answer_seeking = {"just do it",      "write it for me",
                        "give me the code", "do it for me",
                        "just fix it",      "just write it",
                        "give me the answer"};
  return lex;
}

std::optional<Lexicon> parse_lexicon(std::string_view text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
  Lexicon lex = Lexicon::defaults();
  read_phrases(obj, "concept_question", lex.concept_question);
  read_phrases(obj, "independent_exploration", lex.independent_exploration);
  read_phrases(obj, "debug_attempt", lex.debug_attempt);
  read_phrases(obj, "answer_seeking", lex.answer_seeking);
  if (obj.contains("passive_short_max") && obj["passive_short_max"].is_number_integer())
    lex.passive_short_max = obj["passive_short_max"].get<int>();
  if (obj.contains("assistant_long_min") && obj["assistant_long_min"].is_number_integer())
    lex.assistant_long_min = obj["assistant_long_min"].get<int>();
  return lex;
}

Category classify(std::string_view message, std::size_t prior_assistant_length,
                  const Lexicon& lexicon) {
  if (any_phrase_matches(message, lexicon.answer_seeking))
    return Category::answer_seeking;
  if (any_phrase_matches(message, lexicon.concept_question))
    return Category::concept_question;
  if (any_phrase_matches(message, lexicon.independent_exploration))
    return Category::independent_exploration;
  if (any_phrase_matches(message, lexicon.debug_attempt))
    return Category::debug_attempt;
  if (utf8_length(message) < static_cast<std::size_t>(lexicon.passive_short_max) &&
      prior_assistant_length >= static_cast<std::size_t>(lexicon.assistant_long_min))
    return Category::passive_acceptance;
  return Category::neutral;
}

std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::improving: return "improving";
    case Trend::stable: return "stable";
    case Trend::declining: return "declining";
  }
  return "stable";
}

std::optional<Trend> trend_from_string(std::string_view s) {
  if (s == "improving") return Trend::improving;
  if (s == "stable") return Trend::stable;
  if (s == "declining") return Trend::declining;
  return std::nullopt;
}

Trend compute_trend(const std::deque<int>& recent_scores) {
  if (recent_scores.size() < 10) return Trend::stable;
  const std::size_t n = recent_scores.size();
  double last5 = 0.0;
  double prev5 = 0.0;
  for (std::size_t i = n - 5; i < n; ++i) last5 += recent_scores[i];
  for (std::size_t i = n - 10; i < n - 5; ++i) prev5 += recent_scores[i];
  const double delta = (last5 - prev5) / 5.0;
  if (delta > 0.5) return Trend::improving;
  if (delta < -0.5) return Trend::declining;
  return Trend::stable;
}

std::int64_t LearnerProfile::lifetime_non_neutral() const {
  std::int64_t sum = 0;
  for (Category c : kAllCategories)
    if (c != Category::neutral) sum += lifetime_counts[static_cast<std::size_t>(c)];
  return sum;
}

std::int64_t LearnerProfile::lifetime_productive() const {
  std::int64_t sum = 0;
  for (Category c : kAllCategories)
    if (is_productive(c)) sum += lifetime_counts[static_cast<std::size_t>(c)];
  return sum;
}

std::int64_t LearnerProfile::lifetime_unproductive() const {
  std::int64_t sum = 0;
  for (Category c : kAllCategories)
    if (is_unproductive(c)) sum += lifetime_counts[static_cast<std::size_t>(c)];
  return sum;
}

std::int64_t LearnerProfile::module_total() const {
  return std::accumulate(module_counts.begin(), module_counts.end(),
                         std::int64_t{0});
}

std::int64_t LearnerProfile::module_non_neutral() const {
  return module_total() -
         module_counts[static_cast<std::size_t>(Category::neutral)];
}

std::int64_t LearnerProfile::module_productive() const {
  std::int64_t sum = 0;
  for (Category c : kAllCategories)
    if (is_productive(c)) sum += module_counts[static_cast<std::size_t>(c)];
  return sum;
}

std::int64_t LearnerProfile::module_unproductive() const {
  std::int64_t sum = 0;
  for (Category c : kAllCategories)
    if (is_unproductive(c)) sum += module_counts[static_cast<std::size_t>(c)];
  return sum;
}

LearnerProfile update_profile(const LearnerProfile& profile, Category category,
                              std::string now_iso) {
  LearnerProfile next = profile;
  ++next.lifetime_counts[static_cast<std::size_t>(category)];
  ++next.module_counts[static_cast<std::size_t>(category)];
  next.module_quality_sum += score_of(category);

  next.recent_scores.push_back(score_of(category));
  while (next.recent_scores.size() > 10) next.recent_scores.pop_front();

  if (category != Category::neutral) {
    next.window.push_back(category);
    while (next.window.size() > 5) next.window.pop_front();
  }

  auto last3_all = [&](bool (*in_set)(Category)) {
    if (next.window.size() < 3) return false;
    for (std::size_t i = next.window.size() - 3; i < next.window.size(); ++i) {
      if (!in_set(next.window[i])) return false;
    }
    return true;
  };
  next.struggle_streak = last3_all(&in_struggle_set);
  next.engagement_streak = last3_all(&in_engagement_set);
  // The two category groups are disjoint, so both flags can never hold.
  assert(!(next.struggle_streak && next.engagement_streak));

  next.trend = compute_trend(next.recent_scores);
  next.last_updated = now_iso.empty() ? iso8601_now() : std::move(now_iso);
  return next;
}

std::string profile_to_json(const LearnerProfile& profile) {
  json counts = json::object();
  json mcounts = json::object();
  for (Category c : kAllCategories) {
    counts[std::string(to_string(c))] =
        profile.lifetime_counts[static_cast<std::size_t>(c)];
    mcounts[std::string(to_string(c))] =
        profile.module_counts[static_cast<std::size_t>(c)];
  }
  json window = json::array();
  for (Category c : profile.window) window.push_back(std::string(to_string(c)));
  json obj = {
      {"schema_version", profile.schema_version},
      {"lifetime_counts", counts},
      {"module_id", profile.module_id},
      {"module_counts", mcounts},
      {"module_quality_sum", profile.module_quality_sum},
      {"recent_scores", profile.recent_scores},
      {"window", window},
      {"struggle_streak", profile.struggle_streak},
      {"engagement_streak", profile.engagement_streak},
      {"trend", std::string(to_string(profile.trend))},
      {"last_updated", profile.last_updated},
  };
  return obj.dump(2) + "\n";
}

std::optional<LearnerProfile> profile_from_json(std::string_view text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
  if (!obj.contains("schema_version") ||
      !obj["schema_version"].is_number_integer() ||
      obj["schema_version"].get<int>() != 1)
    return std::nullopt;
  LearnerProfile p;
  try {
    auto read_counts = [&](const char* key,
                           std::array<std::int64_t, kCategoryCount>& into) {
      if (!obj.contains(key) || !obj[key].is_object()) return;
      for (Category c : kAllCategories) {
        const std::string name(to_string(c));
        if (obj[key].contains(name))
          into[static_cast<std::size_t>(c)] =
              obj[key][name].get<std::int64_t>();
      }
    };
    read_counts("lifetime_counts", p.lifetime_counts);
    read_counts("module_counts", p.module_counts);
    if (obj.contains("module_id")) p.module_id = obj["module_id"].get<int>();
    if (obj.contains("module_quality_sum"))
      p.module_quality_sum = obj["module_quality_sum"].get<double>();
    if (obj.contains("recent_scores")) {
      for (const auto& v : obj["recent_scores"])
        p.recent_scores.push_back(v.get<int>());
      while (p.recent_scores.size() > 10) p.recent_scores.pop_front();
    }
    if (obj.contains("window")) {
      for (const auto& v : obj["window"]) {
        auto c = category_from_string(v.get<std::string>());
        if (!c || *c == Category::neutral) return std::nullopt;
        p.window.push_back(*c);
      }
      while (p.window.size() > 5) p.window.pop_front();
    }
    if (obj.contains("struggle_streak"))
      p.struggle_streak = obj["struggle_streak"].get<bool>();
    if (obj.contains("engagement_streak"))
      p.engagement_streak = obj["engagement_streak"].get<bool>();
    if (obj.contains("trend")) {
      auto t = trend_from_string(obj["trend"].get<std::string>());
      if (!t) return std::nullopt;
      p.trend = *t;
    }
    if (obj.contains("last_updated"))
      p.last_updated = obj["last_updated"].get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (p.struggle_streak && p.engagement_streak) return std::nullopt;
  return p;
}

LearnerProfile load_profile(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  if (!bytes) return LearnerProfile{};
  auto parsed = profile_from_json(*bytes);
  return parsed ? *parsed : LearnerProfile{};
}

bool save_profile(const std::filesystem::path& path,
                  const LearnerProfile& profile) {
  return write_file_atomic(path, profile_to_json(profile));
}

std::string_view to_string(ObserveStatus s) {
  switch (s) {
    case ObserveStatus::applied: return "applied";
    case ObserveStatus::skipped_lock: return "skipped: lock held";
    case ObserveStatus::skipped_transcript: return "skipped: unreadable transcript";
    case ObserveStatus::skipped_empty: return "skipped: no learner message";
    case ObserveStatus::failed_io: return "skipped: write failed";
  }
  return "skipped";
}

ObserveStatus observe(const std::filesystem::path& transcript_path,
                      const std::filesystem::path& profile_path,
                      const Lexicon& lexicon,
                      std::chrono::seconds lock_stale_after) {
  auto bytes = read_file_bytes(transcript_path);
  if (!bytes) return ObserveStatus::skipped_transcript;

  // Last user record and the assistant record nearest before it.
  std::optional<std::string> user_message;
  std::size_t prior_assistant_length = 0;
  std::size_t last_user_line = 0;
  std::vector<std::pair<std::size_t, json>> records;
  {
    std::size_t lineno = 0;
    for (const Line& ln : split_lines(*bytes)) {
      ++lineno;
      auto t = trim(ln.text);
      if (t.empty()) continue;
      json rec = json::parse(t, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) continue;
      if (!rec.contains("role") || !rec["role"].is_string()) continue;
      if (!rec.contains("content") || !rec["content"].is_string()) continue;
      records.emplace_back(lineno, std::move(rec));
    }
  }
  for (std::size_t i = records.size(); i-- > 0;) {
    if (records[i].second["role"].get<std::string>() == "user") {
      user_message = records[i].second["content"].get<std::string>();
      last_user_line = i;
      break;
    }
  }
  if (!user_message) return ObserveStatus::skipped_empty;
  for (std::size_t i = last_user_line; i-- > 0;) {
    if (records[i].second["role"].get<std::string>() == "assistant") {
      prior_assistant_length =
          utf8_length(records[i].second["content"].get<std::string>());
      break;
    }
  }

  FileLock::Status lock_status = FileLock::Status::error;
  FileLock lock =
      FileLock::for_target(profile_path, lock_stale_after, lock_status);
  if (lock_status != FileLock::Status::acquired)
    return ObserveStatus::skipped_lock;

  LearnerProfile profile = load_profile(profile_path);
  const Category category =
      classify(*user_message, prior_assistant_length, lexicon);
  profile = update_profile(profile, category);
  if (!save_profile(profile_path, profile)) return ObserveStatus::failed_io;
  return ObserveStatus::applied;
}

}  // namespace curricula
