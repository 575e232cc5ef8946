#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ei {

enum class Group { topic, emotion, affect, pronoun };

inline constexpr std::array<Group, 4> kAllGroups{Group::topic, Group::emotion, Group::affect,
                                                 Group::pronoun};

constexpr std::string_view to_string(Group g) {
  switch (g) {
    case Group::topic: return "topic";
    case Group::emotion: return "emotion";
    case Group::affect: return "affect";
    case Group::pronoun: return "pronoun";
  }
  return "";
}

constexpr std::optional<Group> parse_group(std::string_view s) {
  for (auto g : kAllGroups) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

}  // namespace ei
