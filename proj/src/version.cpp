#include "curricula/version.hpp"

#include <cctype>

namespace curricula {

std::optional<Version> Version::parse(std::string_view s) {
  if (!s.empty() && (s.front() == 'v' || s.front() == 'V')) s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  Version v;
  std::size_t i = 0;
  while (i <= s.size()) {
    std::size_t j = i;
    long value = 0;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
      value = value * 10 + (s[j] - '0');
      ++j;
    }
    if (j == i) return std::nullopt;
    v.parts.push_back(static_cast<int>(value));
    if (j == s.size()) break;
    if (s[j] != '.') return std::nullopt;
    i = j + 1;
    if (i == s.size()) return std::nullopt;
  }
  return v;
}

std::string Version::str() const {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(parts[i]);
  }
  return out;
}

std::strong_ordering operator<=>(const Version& a, const Version& b) {
  const std::size_t n = std::max(a.parts.size(), b.parts.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int x = i < a.parts.size() ? a.parts[i] : 0;
    const int y = i < b.parts.size() ? b.parts[i] : 0;
    if (x != y) return x <=> y;
  }
  return std::strong_ordering::equal;
}

}  // namespace curricula
