#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ei/analysis.hpp"
#include "ei/dialogue.hpp"
#include "ei/lexicon.hpp"
#include "ei/reflections.hpp"

namespace ei {

struct ResourceLink {
  std::string topic;
  std::string title;
  std::string url;

  friend bool operator==(const ResourceLink&, const ResourceLink&) = default;
};

class ResourceLibrary {
 public:
  const std::vector<ResourceLink>& links() const noexcept { return links_; }

  friend ResourceLibrary load_resources(std::string_view source, const Lexicon& lexicon);

 private:
  std::vector<ResourceLink> links_;
};

/// Parses `topic | title | url` records; topics must be lexicon topic categories.
inline ResourceLibrary load_resources(std::string_view source, const Lexicon& lexicon) {
  ResourceLibrary lib;
  const auto topics = lexicon.names_in(Group::topic);
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(source)) {
    ++line_no;
    const auto content = detail::trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto fields = detail::split(content, '|');
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 '|'-separated fields, found " +
                                    std::to_string(fields.size()));
    }
    ResourceLink link{std::string(detail::trim(fields[0])), std::string(detail::trim(fields[1])),
                      std::string(detail::trim(fields[2]))};
    if (!std::binary_search(topics.begin(), topics.end(), link.topic)) {
      throw ParseError(line_no, "'" + link.topic + "' is not a topic category");
    }
    if (link.title.empty() || link.url.empty()) throw ParseError(line_no, "empty title or url");
    lib.links_.push_back(std::move(link));
  }
  return lib;
}

inline ResourceLibrary load_resources_file(const std::string& path, const Lexicon& lexicon) {
  return load_resources(read_text_file(path), lexicon);
}

struct PieChart {
  Group group = Group::topic;
  std::map<std::string, double, std::less<>> slices;
  bool empty = true;
};

/// Proportions of each category within its group; all zero and flagged
/// empty when the group has no hits.
inline PieChart make_pie(const CategoryProfile& profile, Group group) {
  PieChart pie;
  pie.group = group;
  const auto counts = profile.group_counts(group);
  std::int64_t total = 0;
  for (const auto& [name, n] : counts) total += n;
  pie.empty = total == 0;
  for (const auto& [name, n] : counts) {
    pie.slices.emplace(name, total == 0 ? 0.0
                                        : static_cast<double>(n) / static_cast<double>(total));
  }
  return pie;
}

/// Running mean of per-session topic proportions.
struct BaselineStats {
  std::map<std::string, double, std::less<>> topic_means;
  std::int64_t session_count = 0;
  std::set<std::string, std::less<>> contributors;

  /// Uniform proportions over the lexicon's topics; shown as "no baseline yet".
  static BaselineStats cold_start(const Lexicon& lexicon) {
    BaselineStats b;
    const auto topics = lexicon.names_in(Group::topic);
    for (const auto& t : topics) b.topic_means.emplace(t, 1.0 / static_cast<double>(topics.size()));
    return b;
  }

  double mean(std::string_view topic) const {
    const auto it = topic_means.find(topic);
    return it == topic_means.end() ? 0.0 : it->second;
  }

  friend bool operator==(const BaselineStats&, const BaselineStats&) = default;
};

/// All user-written text of a session, answers and reflection replies, joined
/// by single spaces.
inline std::string user_text(const SessionState& session) {
  std::string out;
  for (const auto& t : session.turns) {
    if (!is_user_turn(t.kind)) continue;
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

inline CategoryProfile session_profile(const SessionState& session, const Lexicon& lexicon) {
  return analyze_text(user_text(session), lexicon);
}

inline std::map<std::string, double, std::less<>> topic_proportions(const SessionState& session,
                                                                    const Lexicon& lexicon) {
  return make_pie(session_profile(session, lexicon), Group::topic).slices;
}

/// Folds one completed session into the running means. A session can only
/// contribute once.
inline BaselineStats update_baseline(const BaselineStats& baseline, const std::string& session_id,
                                     const std::map<std::string, double, std::less<>>& proportions) {
  if (baseline.contributors.count(session_id) != 0) {
    throw ValidationError("session '" + session_id + "' already counted in the baseline");
  }
  BaselineStats next = baseline;
  next.session_count += 1;
  const double n = static_cast<double>(next.session_count);
  for (const auto& [topic, p] : proportions) {
    auto& mean = next.topic_means[topic];
    mean = next.session_count == 1 ? p : mean + (p - mean) / n;
  }
  next.contributors.insert(session_id);
  return next;
}

inline BaselineStats update_baseline(const BaselineStats& baseline, const SessionState& session,
                                     const Lexicon& lexicon) {
  if (!session.completed()) {
    throw SessionError(SessionErrc::wrong_phase, "session has not reached the feedback phase");
  }
  return update_baseline(baseline, session.session_id, topic_proportions(session, lexicon));
}

struct FeedbackReport {
  // topics, affect, emotions, pronouns
  std::array<PieChart, 4> pies;
  // meaningfulness, self_reflection, emotional_tone
  std::array<ScaleValue, 3> scales;
  std::optional<std::string> most_discussed;
  std::optional<std::string> least_discussed;
  std::string comparison_text;
  std::vector<ResourceLink> resources;
};

inline constexpr std::array<std::string_view, 4> kPieNames{"topics", "affect", "emotions",
                                                           "pronouns"};
inline constexpr std::array<Group, 4> kPieGroups{Group::topic, Group::affect, Group::emotion,
                                                 Group::pronoun};

namespace detail {

inline std::string percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", p * 100.0);
  return buf;
}

/// Topic with the highest (or lowest) count; ties go to the name that sorts first.
inline std::optional<std::string> extreme_topic(
    const std::map<std::string, std::int64_t, std::less<>>& counts, bool highest) {
  std::optional<std::string> best;
  std::int64_t best_count = 0;
  for (const auto& [name, n] : counts) {
    if (!highest && n == 0) continue;
    if (!best || (highest ? n > best_count : n < best_count)) {
      best = name;
      best_count = n;
    }
  }
  if (highest && best_count == 0) return std::nullopt;
  return best;
}

}  // namespace detail

inline FeedbackReport build_report(const SessionState& session, const Lexicon& lexicon,
                                   const BaselineStats& baseline,
                                   const ResourceLibrary& resources) {
  if (!session.completed()) {
    throw SessionError(SessionErrc::wrong_phase, "feedback is available after the closing ratings");
  }
  const auto profile = session_profile(session, lexicon);
  FeedbackReport report;
  for (std::size_t i = 0; i < kPieGroups.size(); ++i) report.pies[i] = make_pie(profile, kPieGroups[i]);
  report.scales = {meaningfulness_scale(session.ratings.meaningful.value_or(kRatingMin)),
                   self_reflection_scale(profile), emotional_tone_scale(profile)};

  const auto topic_counts = profile.group_counts(Group::topic);
  std::size_t nonzero = 0;
  for (const auto& [name, n] : topic_counts) nonzero += n > 0 ? 1 : 0;
  report.most_discussed = detail::extreme_topic(topic_counts, true);
  if (nonzero >= 2) report.least_discussed = detail::extreme_topic(topic_counts, false);

  const auto& topic_pie = report.pies[0];
  if (!report.most_discussed) {
    report.comparison_text = "No topics from our list were detected in your responses.";
  } else {
    const auto describe = [&](const std::string& verb, const std::string& topic) {
      std::string s = "You wrote " + verb + " about " + topic + " (" +
                      detail::percent(topic_pie.slices.at(topic)) + " of your topic words)";
      if (baseline.session_count > 0) {
        s += ", compared with " + detail::percent(baseline.mean(topic)) +
             " for the average user";
      }
      return s + ".";
    };
    report.comparison_text = describe("most", *report.most_discussed);
    if (report.least_discussed) {
      report.comparison_text += " " + describe("least", *report.least_discussed);
    }
    if (baseline.session_count == 0) {
      report.comparison_text += " There is no baseline yet to compare with other users.";
    }
  }

  std::set<std::string, std::less<>> seen_urls;
  for (const auto& [topic, n] : topic_counts) {
    if (n == 0) continue;
    for (const auto& link : resources.links()) {
      if (link.topic == topic && seen_urls.insert(link.url).second) {
        report.resources.push_back(link);
      }
    }
  }
  return report;
}

}  // namespace ei
