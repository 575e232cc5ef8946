#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ei/dialogue.hpp"
#include "ei/feedback.hpp"

namespace ei {

using json = nlohmann::json;

/// One stored interview. `state` holds the whole conversation; nothing else
/// about the writer is recorded.
struct SessionRecord {
  std::string session_id;
  std::int64_t created_at_ms = 0;  // UTC, milliseconds since the Unix epoch
  SessionState state;
  bool completed = false;

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

inline SessionRecord make_record(const SessionState& state, std::int64_t created_at_ms) {
  return SessionRecord{state.session_id, created_at_ms, state, state.completed()};
}

namespace detail {

template <typename Enum, std::size_t N>
Enum enum_from(const json& j, const std::array<Enum, N>& values, std::string_view what) {
  const auto s = j.get<std::string>();
  for (auto v : values) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown " + std::string(what) + " '" + s + "'");
}

inline constexpr std::array<PhaseKind, 5> kPhaseKinds{PhaseKind::pre_ratings,
                                                      PhaseKind::interviewing,
                                                      PhaseKind::post_ratings, PhaseKind::feedback,
                                                      PhaseKind::closed};
inline constexpr std::array<Awaiting, 2> kAwaiting{Awaiting::main_answer,
                                                   Awaiting::reflection_reply};
inline constexpr std::array<TurnKind, 4> kTurnKinds{TurnKind::prompt, TurnKind::user_message,
                                                    TurnKind::reflection,
                                                    TurnKind::reflection_reply};

inline json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<int> read_optional_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<int>();
}

/// Runs a json accessor, turning library exceptions into ValidationError.
template <typename F>
auto guarded(std::string_view what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError("malformed " + std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

inline json ratings_to_json(const RatingSet& r) {
  return json{{"life_satisfaction", detail::optional_int(r.life_satisfaction)},
              {"stress_before", detail::optional_int(r.stress_before)},
              {"stress_after", detail::optional_int(r.stress_after)},
              {"personal", detail::optional_int(r.personal)},
              {"meaningful", detail::optional_int(r.meaningful)}};
}

inline RatingSet ratings_from_json(const json& j) {
  return RatingSet{detail::read_optional_int(j, "life_satisfaction"),
                   detail::read_optional_int(j, "stress_before"),
                   detail::read_optional_int(j, "stress_after"),
                   detail::read_optional_int(j, "personal"),
                   detail::read_optional_int(j, "meaningful")};
}

inline json turn_to_json(const Turn& t) {
  return json{{"kind", to_string(t.kind)},
              {"text", t.text},
              {"timestamp_ms", t.timestamp_ms},
              {"word_count", t.word_count},
              {"triggered_by", t.triggered_by}};
}

inline json state_to_json(const SessionState& s) {
  json turns = json::array();
  for (const auto& t : s.turns) turns.push_back(turn_to_json(t));
  json order = json::array();
  for (auto p : s.prompt_order) order.push_back(to_string(p));
  return json{{"session_id", s.session_id},
              {"rng_seed", s.rng_seed},
              {"rng_draws", s.rng_draws},
              {"prompt_order", order},
              {"phase",
               {{"kind", to_string(s.phase.kind)},
                {"prompt_index", s.phase.prompt_index},
                {"awaiting", to_string(s.phase.awaiting)}}},
              {"turns", turns},
              {"ratings", ratings_to_json(s.ratings)},
              {"used_reflections", s.used_reflections}};
}

inline SessionState state_from_json(const json& j) {
  return detail::guarded("session state", [&] {
    SessionState s;
    s.session_id = j.at("session_id").get<std::string>();
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    s.rng_draws = j.at("rng_draws").get<std::uint64_t>();
    const auto& order = j.at("prompt_order");
    if (!order.is_array() || order.size() != 3) {
      throw ValidationError("prompt_order must list three prompts");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      s.prompt_order[i] = detail::enum_from(order[i], kAllPrompts, "prompt");
    }
    const auto& phase = j.at("phase");
    s.phase.kind = detail::enum_from(phase.at("kind"), detail::kPhaseKinds, "phase");
    s.phase.prompt_index = phase.at("prompt_index").get<int>();
    s.phase.awaiting = detail::enum_from(phase.at("awaiting"), detail::kAwaiting, "awaiting");
    for (const auto& t : j.at("turns")) {
      s.turns.push_back(Turn{detail::enum_from(t.at("kind"), detail::kTurnKinds, "turn kind"),
                             t.at("text").get<std::string>(),
                             t.at("timestamp_ms").get<std::int64_t>(),
                             t.at("word_count").get<std::int64_t>(),
                             t.at("triggered_by").get<std::string>()});
    }
    s.ratings = ratings_from_json(j.at("ratings"));
    s.used_reflections = j.at("used_reflections").get<std::vector<std::string>>();
    return s;
  });
}

inline json record_to_json(const SessionRecord& r) {
  return json{{"session_id", r.session_id},
              {"created_at", r.created_at_ms},
              {"completed", r.completed},
              {"state", state_to_json(r.state)}};
}

inline SessionRecord record_from_json(const json& j) {
  return detail::guarded("session record", [&] {
    SessionRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    r.created_at_ms = j.at("created_at").get<std::int64_t>();
    r.completed = j.at("completed").get<bool>();
    r.state = state_from_json(j.at("state"));
    if (r.state.session_id != r.session_id) {
      throw ValidationError("record id does not match state id");
    }
    return r;
  });
}

inline json baseline_to_json(const BaselineStats& b) {
  return json{{"topic_means", b.topic_means},
              {"session_count", b.session_count},
              {"contributors", b.contributors}};
}

inline BaselineStats baseline_from_json(const json& j) {
  return detail::guarded("baseline", [&] {
    BaselineStats b;
    for (const auto& [k, v] : j.at("topic_means").items()) b.topic_means.emplace(k, v.get<double>());
    b.session_count = j.at("session_count").get<std::int64_t>();
    for (const auto& c : j.at("contributors")) b.contributors.insert(c.get<std::string>());
    return b;
  });
}

inline json scale_to_json(const ScaleValue& s) {
  return json{{"value", s.value}, {"descriptor", s.descriptor}};
}

/// Report document consumed by the web UI and the CLI.
inline json report_to_json(const FeedbackReport& r) {
  json pies = json::object();
  for (std::size_t i = 0; i < r.pies.size(); ++i) {
    pies[std::string(kPieNames[i])] = json{{"group", to_string(r.pies[i].group)},
                                           {"empty", r.pies[i].empty},
                                           {"slices", r.pies[i].slices}};
  }
  json scales = json::object();
  for (const auto& s : r.scales) scales[std::string(to_string(s.name))] = scale_to_json(s);
  json resources = json::array();
  for (const auto& l : r.resources) {
    resources.push_back(json{{"topic", l.topic}, {"title", l.title}, {"url", l.url}});
  }
  return json{{"pies", pies},
              {"scales", scales},
              {"most_discussed", r.most_discussed ? json(*r.most_discussed) : json(nullptr)},
              {"least_discussed", r.least_discussed ? json(*r.least_discussed) : json(nullptr)},
              {"comparison_text", r.comparison_text},
              {"resources", resources}};
}

}  // namespace ei
