#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ei/category_profile.hpp"
#include "ei/error.hpp"
#include "ei/group.hpp"

namespace ei {

struct DominanceResult {
  std::optional<std::string> dominant;
  std::optional<Group> group;
  std::int64_t top_count = 0;
  std::int64_t runner_up_count = 0;

  explicit operator bool() const noexcept { return dominant.has_value(); }
};

/// Finds the category of `group` whose count is at least 1 and at least 50%
/// higher than the second-highest count in the same group. Ties and all-zero
/// groups have no dominant category.
inline DominanceResult dominant_category(const CategoryProfile& profile, Group group) {
  DominanceResult r;
  const std::string* top_name = nullptr;
  for (const auto& [name, count] : profile.group_counts(group)) {
    if (top_name == nullptr || count > r.top_count) {
      if (top_name != nullptr) r.runner_up_count = r.top_count;
      r.top_count = count;
      top_name = &name;
    } else if (count > r.runner_up_count) {
      r.runner_up_count = count;
    }
  }
  // Integer form of top >= 1.5 * runner_up, inclusive.
  if (top_name != nullptr && r.top_count >= 1 && 2 * r.top_count >= 3 * r.runner_up_count) {
    r.dominant = std::string(*top_name);
    r.group = group;
  }
  return r;
}

enum class ScaleName { meaningfulness, self_reflection, emotional_tone };

constexpr std::string_view to_string(ScaleName s) {
  switch (s) {
    case ScaleName::meaningfulness: return "meaningfulness";
    case ScaleName::self_reflection: return "self_reflection";
    case ScaleName::emotional_tone: return "emotional_tone";
  }
  return "";
}

struct ScaleValue {
  ScaleName name = ScaleName::meaningfulness;
  double value = 0.0;
  std::string descriptor;
};

/// Descriptor bands: [0,2) very low, [2,4) low, [4,6) moderate, [6,8) high,
/// [8,10] very high.
inline std::string scale_descriptor(double value) {
  if (value < 2.0) return "very low";
  if (value < 4.0) return "low";
  if (value < 6.0) return "moderate";
  if (value < 8.0) return "high";
  return "very high";
}

inline constexpr double kSelfReflectionAnchor = 0.15;
inline constexpr double kEmotionalToneAnchor = 0.10;

namespace detail {

inline ScaleValue make_scale(ScaleName name, double unit) {
  const double value = std::clamp(unit, 0.0, 1.0) * 10.0;
  return ScaleValue{name, value, scale_descriptor(value)};
}

}  // namespace detail

/// First-person-singular rate, with 15% of tokens mapping to the top of the scale.
inline ScaleValue self_reflection_scale(const CategoryProfile& profile) {
  const double raw = profile.total_tokens == 0
                         ? 0.0
                         : static_cast<double>(profile.count("i")) /
                               static_cast<double>(profile.total_tokens);
  return detail::make_scale(ScaleName::self_reflection, raw / kSelfReflectionAnchor);
}

/// (positive - negative) / tokens, mapped linearly so that -10%..+10% spans
/// the scale and zero lands on 5.
inline ScaleValue emotional_tone_scale(const CategoryProfile& profile) {
  const double raw =
      profile.total_tokens == 0
          ? 0.0
          : static_cast<double>(profile.count("positive") - profile.count("negative")) /
                static_cast<double>(profile.total_tokens);
  return detail::make_scale(ScaleName::emotional_tone,
                            (raw + kEmotionalToneAnchor) / (2.0 * kEmotionalToneAnchor));
}

inline ScaleValue meaningfulness_scale(int post_rating) {
  if (post_rating < 1 || post_rating > 7) {
    throw ValidationError("meaningfulness rating " + std::to_string(post_rating) +
                          " outside 1-7");
  }
  const double value = (post_rating - 1) * 10.0 / 6.0;
  return ScaleValue{ScaleName::meaningfulness, value, scale_descriptor(value)};
}

}  // namespace ei
