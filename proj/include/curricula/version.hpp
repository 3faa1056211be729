#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curricula {

// Dotted numeric version, e.g. "2.12.0". Comparison is componentwise with
// missing trailing components treated as zero.
struct Version {
  std::vector<int> parts;

  static std::optional<Version> parse(std::string_view s);
  std::string str() const;

  friend std::strong_ordering operator<=>(const Version& a, const Version& b);
  friend bool operator==(const Version& a, const Version& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

}  // namespace curricula
