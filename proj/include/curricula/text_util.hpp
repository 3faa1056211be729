#ifndef CURRICULA_TEXT_UTIL_HPP
#define CURRICULA_TEXT_UTIL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curricula {

/// One physical line of a document, EOL excluded but recorded.
struct Line {
  std::string_view text;     // without trailing \n or \r\n
  std::int64_t offset = 0;   // byte offset of the line start
  int number = 0;            // 1-based
  bool crlf = false;         // line ended with \r\n
};

/// Splits into lines without copying. A trailing line with no EOL is kept.
std::vector<Line> split_lines(std::string_view text);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
bool contains_icase(std::string_view haystack, std::string_view needle);

/// Trim + casefold + collapse internal whitespace runs to single spaces.
std::string normalize_phrase(std::string_view s);

/// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s);

/// Current time as an ISO-8601 UTC timestamp, e.g. "2026-08-19T12:00:00Z".
std::string iso8601_now();

}  // namespace curricula

#endif  // CURRICULA_TEXT_UTIL_HPP
