#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "ei/group.hpp"

namespace ei {

/// Per-text category hit counts. Every category of the source lexicon is
/// present in `counts`, zero or not, so group membership is complete.
struct CategoryProfile {
  std::map<std::string, std::int64_t, std::less<>> counts;
  std::map<std::string, Group, std::less<>> group_of;
  std::int64_t total_tokens = 0;

  std::int64_t count(std::string_view category) const {
    const auto it = counts.find(category);
    return it == counts.end() ? 0 : it->second;
  }

  /// Category counts restricted to one group, in name order.
  std::map<std::string, std::int64_t, std::less<>> group_counts(Group group) const {
    std::map<std::string, std::int64_t, std::less<>> out;
    for (const auto& [name, g] : group_of) {
      if (g == group) out.emplace(name, count(name));
    }
    return out;
  }

  CategoryProfile& operator+=(const CategoryProfile& other) {
    for (const auto& [name, n] : other.counts) counts[name] += n;
    for (const auto& [name, g] : other.group_of) group_of.emplace(name, g);
    total_tokens += other.total_tokens;
    return *this;
  }

  friend bool operator==(const CategoryProfile&, const CategoryProfile&) = default;
};

}  // namespace ei
