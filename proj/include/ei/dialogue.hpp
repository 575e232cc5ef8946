#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ei/analysis.hpp"
#include "ei/detail/random.hpp"
#include "ei/detail/text.hpp"
#include "ei/error.hpp"
#include "ei/lexicon.hpp"
#include "ei/reflections.hpp"

namespace ei {

enum class PhaseKind { pre_ratings, interviewing, post_ratings, feedback, closed };
enum class Awaiting { main_answer, reflection_reply };

constexpr std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::pre_ratings: return "pre_ratings";
    case PhaseKind::interviewing: return "interviewing";
    case PhaseKind::post_ratings: return "post_ratings";
    case PhaseKind::feedback: return "feedback";
    case PhaseKind::closed: return "closed";
  }
  return "";
}

constexpr std::string_view to_string(Awaiting a) {
  return a == Awaiting::main_answer ? "main_answer" : "reflection_reply";
}

struct Phase {
  PhaseKind kind = PhaseKind::pre_ratings;
  // Only meaningful while interviewing.
  int prompt_index = 0;
  Awaiting awaiting = Awaiting::main_answer;

  friend bool operator==(const Phase&, const Phase&) = default;
};

enum class TurnKind { prompt, user_message, reflection, reflection_reply };

constexpr std::string_view to_string(TurnKind k) {
  switch (k) {
    case TurnKind::prompt: return "prompt";
    case TurnKind::user_message: return "user_message";
    case TurnKind::reflection: return "reflection";
    case TurnKind::reflection_reply: return "reflection_reply";
  }
  return "";
}

constexpr bool is_user_turn(TurnKind k) {
  return k == TurnKind::user_message || k == TurnKind::reflection_reply;
}

struct Turn {
  TurnKind kind = TurnKind::prompt;
  std::string text;
  std::int64_t timestamp_ms = 0;  // since session start
  std::int64_t word_count = 0;    // user turns only
  // Prompt id or reflection id this turn shows or answers.
  std::string triggered_by;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct RatingSet {
  std::optional<int> life_satisfaction;
  std::optional<int> stress_before;
  std::optional<int> stress_after;
  std::optional<int> personal;
  std::optional<int> meaningful;

  std::optional<int> delta_stress() const {
    if (!stress_before || !stress_after) return std::nullopt;
    return *stress_after - *stress_before;
  }

  friend bool operator==(const RatingSet&, const RatingSet&) = default;
};

inline constexpr int kRatingMin = 1;
inline constexpr int kRatingMax = 7;
inline constexpr int kPromptsPerSession = 4;

struct SessionState {
  std::string session_id;
  std::uint64_t rng_seed = 0;
  // Number of reflection selections drawn so far; each uses its own stream.
  std::uint64_t rng_draws = 0;
  std::array<PromptId, 3> prompt_order{PromptId::looking_forward, PromptId::advice_to_others,
                                       PromptId::grateful};
  Phase phase;
  std::vector<Turn> turns;
  RatingSet ratings;
  std::vector<std::string> used_reflections;

  /// Full prompt sequence: major issues first, then the shuffled follow-ups.
  std::array<PromptId, 4> prompt_sequence() const {
    return {PromptId::major_issues, prompt_order[0], prompt_order[1], prompt_order[2]};
  }

  bool completed() const {
    return phase.kind == PhaseKind::feedback || phase.kind == PhaseKind::closed;
  }

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

/// Ordering key for phase progress; a later state never has a smaller key.
inline std::pair<int, std::size_t> progress_key(const SessionState& s) {
  return {static_cast<int>(s.phase.kind), s.turns.size()};
}

enum class SessionErrc { invalid_rating, wrong_phase, empty_message };

class SessionError : public Error {
 public:
  SessionError(SessionErrc code, const std::string& what) : Error(what), code_(code) {}
  SessionErrc code() const noexcept { return code_; }

 private:
  SessionErrc code_;
};

/// The six orderings of the follow-up prompts, in lexicographic order.
inline constexpr std::array<std::array<PromptId, 3>, 6> kFollowUpOrders{{
    {PromptId::looking_forward, PromptId::advice_to_others, PromptId::grateful},
    {PromptId::looking_forward, PromptId::grateful, PromptId::advice_to_others},
    {PromptId::advice_to_others, PromptId::looking_forward, PromptId::grateful},
    {PromptId::advice_to_others, PromptId::grateful, PromptId::looking_forward},
    {PromptId::grateful, PromptId::looking_forward, PromptId::advice_to_others},
    {PromptId::grateful, PromptId::advice_to_others, PromptId::looking_forward},
}};

inline std::array<PromptId, 3> follow_up_order_for_seed(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return kFollowUpOrders[detail::uniform_below(rng, kFollowUpOrders.size())];
}

inline SessionState start_session(std::uint64_t seed, std::string session_id = {}) {
  SessionState s;
  s.session_id = std::move(session_id);
  s.rng_seed = seed;
  s.prompt_order = follow_up_order_for_seed(seed);
  return s;
}

/// Impersonal pronouns dominate the pronoun group and the writer never
/// refers to themself.
inline bool impersonal_flag(const CategoryProfile& profile) {
  const auto pron = dominant_category(profile, Group::pronoun);
  return pron.dominant == "impersonal" && profile.count("i") == 0;
}

/// Picks the reflection for one main answer. Rules in priority order, each
/// skipped if its reflection was already used this session:
///   1. dominant emotion category
///   2. dominant topic category
///   3. impersonal pronouns dominate and the writer never refers to themself
/// Otherwise an unused generic reflection is drawn uniformly; once every
/// generic has been used they become eligible again.
inline const Reflection& select_reflection(std::string_view text, const Lexicon& lexicon,
                                           const ReflectionLibrary& library,
                                           const std::vector<std::string>& used,
                                           std::mt19937_64& rng) {
  const auto is_used = [&](const Reflection& r) {
    return std::find(used.begin(), used.end(), r.id) != used.end();
  };
  const auto profile = analyze_text(text, lexicon);

  for (auto [group, kind] : {std::pair{Group::emotion, TriggerKind::emotion},
                             std::pair{Group::topic, TriggerKind::topic}}) {
    if (const auto dom = dominant_category(profile, group)) {
      const auto* r = library.for_category(kind, *dom.dominant);
      if (r != nullptr && !is_used(*r)) return *r;
    }
  }
  if (impersonal_flag(profile)) {
    const auto* r = library.impersonal();
    if (r != nullptr && !is_used(*r)) return *r;
  }

  const auto generics = library.generics();
  std::vector<const Reflection*> fresh;
  std::copy_if(generics.begin(), generics.end(), std::back_inserter(fresh),
               [&](const Reflection* r) { return !is_used(*r); });
  const auto& pool = fresh.empty() ? generics : fresh;
  return *pool[detail::uniform_below(rng, pool.size())];
}

enum class ReplyKind { reflection, prompt, post_ratings_gate };

constexpr std::string_view to_string(ReplyKind k) {
  switch (k) {
    case ReplyKind::reflection: return "reflection";
    case ReplyKind::prompt: return "prompt";
    case ReplyKind::post_ratings_gate: return "post_ratings_gate";
  }
  return "";
}

struct MessageOutcome {
  SessionState state;
  ReplyKind kind = ReplyKind::reflection;
  std::string reply_text;
  // The system turn appended to the transcript; absent for the closing gate.
  std::optional<Turn> reply_turn;
};

namespace detail {

inline void require_rating(int value, std::string_view name) {
  if (value < kRatingMin || value > kRatingMax) {
    throw SessionError(SessionErrc::invalid_rating, std::string(name) + " rating " +
                                                        std::to_string(value) +
                                                        " outside 1-7");
  }
}

inline void require_phase(const SessionState& s, PhaseKind expected) {
  if (s.phase.kind != expected) {
    throw SessionError(SessionErrc::wrong_phase, "session is in phase '" +
                                                     std::string(to_string(s.phase.kind)) +
                                                     "', expected '" +
                                                     std::string(to_string(expected)) + "'");
  }
}

inline std::int64_t next_timestamp(const SessionState& s, std::int64_t at_ms) {
  const std::int64_t last = s.turns.empty() ? 0 : s.turns.back().timestamp_ms;
  return std::max({at_ms, last, std::int64_t{0}});
}

}  // namespace detail

/// Pure state transitions for one interview. Every operation returns a new
/// state and leaves its input untouched, also when it throws.
class Interviewer {
 public:
  Interviewer(const Lexicon& lexicon, const ReflectionLibrary& library)
      : lexicon_(&lexicon), library_(&library) {}

  const Lexicon& lexicon() const noexcept { return *lexicon_; }
  const ReflectionLibrary& library() const noexcept { return *library_; }

  SessionState submit_pre_ratings(const SessionState& state, int life_satisfaction, int stress,
                                  std::int64_t at_ms = 0) const {
    detail::require_phase(state, PhaseKind::pre_ratings);
    detail::require_rating(life_satisfaction, "life_satisfaction");
    detail::require_rating(stress, "stress");
    SessionState next = state;
    next.ratings.life_satisfaction = life_satisfaction;
    next.ratings.stress_before = stress;
    next.phase = Phase{PhaseKind::interviewing, 0, Awaiting::main_answer};
    next.turns.push_back(prompt_turn(PromptId::major_issues, detail::next_timestamp(state, at_ms)));
    return next;
  }

  MessageOutcome submit_message(const SessionState& state, std::string_view text,
                                std::int64_t at_ms = 0) const {
    detail::require_phase(state, PhaseKind::interviewing);
    const auto trimmed = detail::trim(text);
    if (trimmed.empty()) {
      throw SessionError(SessionErrc::empty_message, "message is empty");
    }
    const auto ts = detail::next_timestamp(state, at_ms);
    MessageOutcome out{state, ReplyKind::reflection, {}, std::nullopt};
    SessionState& next = out.state;
    const auto words = static_cast<std::int64_t>(tokenize(trimmed).raw_length_words());

    if (state.phase.awaiting == Awaiting::main_answer) {
      const auto pid = state.prompt_sequence()[static_cast<std::size_t>(state.phase.prompt_index)];
      next.turns.push_back(
          Turn{TurnKind::user_message, std::string(trimmed), ts, words, std::string(to_string(pid))});
      std::mt19937_64 rng(detail::derive_seed(state.rng_seed, state.rng_draws));
      ++next.rng_draws;
      const auto& r = select_reflection(trimmed, *lexicon_, *library_, state.used_reflections, rng);
      if (std::find(next.used_reflections.begin(), next.used_reflections.end(), r.id) ==
          next.used_reflections.end()) {
        next.used_reflections.push_back(r.id);
      }
      Turn reply{TurnKind::reflection, r.text, ts, 0, r.id};
      next.turns.push_back(reply);
      next.phase.awaiting = Awaiting::reflection_reply;
      out.kind = ReplyKind::reflection;
      out.reply_text = r.text;
      out.reply_turn = std::move(reply);
      return out;
    }

    next.turns.push_back(Turn{TurnKind::reflection_reply, std::string(trimmed), ts, words,
                              last_reflection_id(state)});
    if (state.phase.prompt_index + 1 < kPromptsPerSession) {
      const int index = state.phase.prompt_index + 1;
      next.phase = Phase{PhaseKind::interviewing, index, Awaiting::main_answer};
      auto reply = prompt_turn(next.prompt_sequence()[static_cast<std::size_t>(index)], ts);
      next.turns.push_back(reply);
      out.kind = ReplyKind::prompt;
      out.reply_text = reply.text;
      out.reply_turn = std::move(reply);
    } else {
      next.phase = Phase{PhaseKind::post_ratings, 0, Awaiting::main_answer};
      out.kind = ReplyKind::post_ratings_gate;
      out.reply_text = library_->closing_text();
    }
    return out;
  }

  SessionState submit_post_ratings(const SessionState& state, int stress_after, int personal,
                                   int meaningful) const {
    detail::require_phase(state, PhaseKind::post_ratings);
    detail::require_rating(stress_after, "stress");
    detail::require_rating(personal, "personal");
    detail::require_rating(meaningful, "meaningful");
    SessionState next = state;
    next.ratings.stress_after = stress_after;
    next.ratings.personal = personal;
    next.ratings.meaningful = meaningful;
    next.phase = Phase{PhaseKind::feedback, 0, Awaiting::main_answer};
    return next;
  }

  SessionState close_session(const SessionState& state) const {
    detail::require_phase(state, PhaseKind::feedback);
    SessionState next = state;
    next.phase = Phase{PhaseKind::closed, 0, Awaiting::main_answer};
    return next;
  }

 private:
  Turn prompt_turn(PromptId id, std::int64_t ts) const {
    return Turn{TurnKind::prompt, library_->prompt(id).text, ts, 0, std::string(to_string(id))};
  }

  static std::string last_reflection_id(const SessionState& s) {
    for (auto it = s.turns.rbegin(); it != s.turns.rend(); ++it) {
      if (it->kind == TurnKind::reflection) return it->triggered_by;
    }
    return {};
  }

  const Lexicon* lexicon_;
  const ReflectionLibrary* library_;
};

/// Checks the structural invariants of a (possibly partial) session: turn
/// kinds follow prompt, answer, reflection, reply for each prompt in order,
/// the transcript length matches the phase, timestamps never decrease,
/// reflections are not recorded twice and ratings stay in range. Returns a
/// description of the first violation.
inline std::optional<std::string> structure_error(const SessionState& s) {
  if (!std::is_permutation(s.prompt_order.begin(), s.prompt_order.end(),
                           kFollowUpOrders[0].begin())) {
    return "prompt_order is not a permutation of the follow-up prompts";
  }
  const auto seq = s.prompt_sequence();
  for (std::size_t i = 0; i < s.turns.size(); ++i) {
    const auto& t = s.turns[i];
    const auto expected = static_cast<TurnKind>(i % 4);
    if (t.kind != expected) {
      return "turn " + std::to_string(i) + " is '" + std::string(to_string(t.kind)) +
             "', expected '" + std::string(to_string(expected)) + "'";
    }
    if (i / 4 >= seq.size()) return "more than four prompts";
    if ((t.kind == TurnKind::prompt || t.kind == TurnKind::user_message) &&
        t.triggered_by != to_string(seq[i / 4])) {
      return "turn " + std::to_string(i) + " refers to the wrong prompt";
    }
    if ((t.kind == TurnKind::reflection_reply) && t.triggered_by != s.turns[i - 1].triggered_by) {
      return "turn " + std::to_string(i) + " answers a different reflection";
    }
    if (i > 0 && t.timestamp_ms < s.turns[i - 1].timestamp_ms) {
      return "timestamps decrease at turn " + std::to_string(i);
    }
    if (is_user_turn(t.kind) && t.word_count != static_cast<std::int64_t>(
                                                    tokenize(t.text).raw_length_words())) {
      return "word count mismatch at turn " + std::to_string(i);
    }
  }
  std::size_t expected_turns = 0;
  switch (s.phase.kind) {
    case PhaseKind::pre_ratings: expected_turns = 0; break;
    case PhaseKind::interviewing:
      if (s.phase.prompt_index < 0 || s.phase.prompt_index >= kPromptsPerSession) {
        return "prompt index out of range";
      }
      expected_turns = static_cast<std::size_t>(s.phase.prompt_index) * 4 +
                       (s.phase.awaiting == Awaiting::main_answer ? 1 : 3);
      break;
    default: expected_turns = 16; break;
  }
  if (s.turns.size() != expected_turns) {
    return "phase '" + std::string(to_string(s.phase.kind)) + "' expects " +
           std::to_string(expected_turns) + " turns, found " + std::to_string(s.turns.size());
  }
  for (std::size_t i = 0; i < s.used_reflections.size(); ++i) {
    for (std::size_t j = i + 1; j < s.used_reflections.size(); ++j) {
      if (s.used_reflections[i] == s.used_reflections[j]) return "reflection recorded twice";
    }
  }
  const auto& r = s.ratings;
  for (const auto& v : {r.life_satisfaction, r.stress_before, r.stress_after, r.personal,
                        r.meaningful}) {
    if (v && (*v < kRatingMin || *v > kRatingMax)) return "rating outside 1-7";
  }
  const bool pre_set = r.life_satisfaction && r.stress_before;
  const bool post_set = r.stress_after && r.personal && r.meaningful;
  if (s.phase.kind != PhaseKind::pre_ratings && !pre_set) return "missing pre-session ratings";
  if (s.completed() != post_set) return "post-session ratings do not match phase";
  return std::nullopt;
}

}  // namespace ei
