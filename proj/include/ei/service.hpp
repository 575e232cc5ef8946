#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ei/dialogue.hpp"
#include "ei/feedback.hpp"
#include "ei/lexicon.hpp"
#include "ei/reflections.hpp"
#include "ei/serialization.hpp"
#include "ei/store.hpp"

namespace ei {

/// Everything loaded from the three content files.
struct InterviewContent {
  Lexicon lexicon;
  ReflectionLibrary reflections;
  ResourceLibrary resources;

  static InterviewContent load(const std::string& lexicon_path,
                               const std::string& reflections_path,
                               const std::string& resources_path) {
    InterviewContent c;
    c.lexicon = load_lexicon_file(lexicon_path);
    c.reflections = load_reflections_file(reflections_path, c.lexicon);
    c.resources = load_resources_file(resources_path, c.lexicon);
    return c;
  }
};

/// Presentation hints for the client-side typing persona.
struct TypingHints {
  int pause_ms = 2000;
  int per_char_ms = 40;
  double typo_probability = 0.02;
  int typo_correction_ms = 150;
};

inline json hints_to_json(const TypingHints& h) {
  return json{{"pause_ms", h.pause_ms},
              {"per_char_ms", h.per_char_ms},
              {"typo_probability", h.typo_probability},
              {"typo_correction_ms", h.typo_correction_ms}};
}

/// Injection points for time and randomness; tests replace them to get
/// reproducible transcripts.
struct ServiceHooks {
  std::function<std::int64_t()> now_ms;
  std::function<std::uint64_t()> next_seed;
  std::function<std::string()> next_session_id;
};

inline ServiceHooks default_hooks() {
  auto rd = std::make_shared<std::random_device>();
  auto rd_mutex = std::make_shared<std::mutex>();
  return ServiceHooks{
      [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
      },
      [rd, rd_mutex] {
        std::lock_guard lock(*rd_mutex);
        return (static_cast<std::uint64_t>((*rd)()) << 32) | (*rd)();
      },
      [] { return random_session_id(); }};
}

struct ApiResponse {
  int status = 200;
  json body;
};

inline ApiResponse api_ok(json data) { return {200, json{{"ok", true}, {"data", std::move(data)}}}; }

inline ApiResponse api_error(int status, std::string_view code, std::string_view message) {
  return {status,
          json{{"ok", false}, {"error", {{"code", code}, {"message", message}}}}};
}

/// The interview HTTP API. Requests for one session id are serialized;
/// all state lives in the store, so a restarted service resumes sessions
/// exactly where they stopped.
class Service {
 public:
  Service(const InterviewContent& content, SessionStore& store, ServiceHooks hooks = default_hooks(),
          TypingHints hints = {})
      : content_(content),
        store_(store),
        hooks_(std::move(hooks)),
        hints_(hints),
        interviewer_(content.lexicon, content.reflections) {
    const auto defaults = default_hooks();
    if (!hooks_.now_ms) hooks_.now_ms = defaults.now_ms;
    if (!hooks_.next_seed) hooks_.next_seed = defaults.next_seed;
    if (!hooks_.next_session_id) hooks_.next_session_id = defaults.next_session_id;
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const TypingHints& typing_hints() const noexcept { return hints_; }

  /// POST /api/session. The request body is ignored.
  ApiResponse create_session() {
    return guarded([&] {
      for (int attempt = 0; attempt < 3; ++attempt) {
        auto state = start_session(hooks_.next_seed(), hooks_.next_session_id());
        try {
          store_.insert_session(make_record(state, hooks_.now_ms()));
          return api_ok(json{{"session_id", state.session_id}});
        } catch (const StoreError& e) {
          if (e.code() != StoreErrc::duplicate_id) throw;
        }
      }
      return api_error(500, "storage_error", "could not allocate a session id");
    });
  }

  /// GET /api/session/{id}: phase and transcript, enough to rebuild the chat view.
  ApiResponse get_session(std::string_view id) {
    return with_session(id, [&](const SessionRecord& record) {
      const auto& s = record.state;
      json transcript = json::array();
      for (const auto& t : s.turns) {
        transcript.push_back(json{{"kind", to_string(t.kind)},
                                  {"text", t.text},
                                  {"timestamp_ms", t.timestamp_ms}});
      }
      const auto& r = s.ratings;
      return api_ok(json{
          {"session_id", s.session_id},
          {"phase",
           {{"kind", to_string(s.phase.kind)},
            {"prompt_index", s.phase.prompt_index},
            {"awaiting", to_string(s.phase.awaiting)}}},
          {"transcript", transcript},
          {"pre_ratings_submitted", r.life_satisfaction.has_value()},
          {"post_ratings_submitted", r.meaningful.has_value()},
          {"typing_hints", hints_to_json(hints_)}});
    });
  }

  /// POST /api/session/{id}/pre-ratings {life_satisfaction, stress}
  ApiResponse submit_pre_ratings(std::string_view id, std::string_view body) {
    return with_session(id, [&](const SessionRecord& record) {
      const auto req = parse_body(body);
      if (!req) return bad_body();
      const auto life = int_field(*req, "life_satisfaction");
      const auto stress = int_field(*req, "stress");
      if (!life || !stress) return bad_body();
      auto next = interviewer_.submit_pre_ratings(record.state, *life, *stress, elapsed(record));
      save(record, next);
      return api_ok(json{{"next_prompt", next.turns.back().text},
                         {"prompt_id", next.turns.back().triggered_by},
                         {"typing_hints", hints_to_json(hints_)}});
    });
  }

  /// POST /api/session/{id}/message {text}
  ApiResponse submit_message(std::string_view id, std::string_view body) {
    return with_session(id, [&](const SessionRecord& record) {
      const auto req = parse_body(body);
      if (!req || !req->contains("text") || !req->at("text").is_string()) return bad_body();
      auto outcome = interviewer_.submit_message(record.state, req->at("text").get<std::string>(),
                                                 elapsed(record));
      save(record, outcome.state);
      return api_ok(json{{"reply_kind", to_string(outcome.kind)},
                         {"reply_text", outcome.reply_text},
                         {"typing_hints", hints_to_json(hints_)}});
    });
  }

  /// POST /api/session/{id}/post-ratings {stress, personal, meaningful}
  ApiResponse submit_post_ratings(std::string_view id, std::string_view body) {
    return with_session(id, [&](const SessionRecord& record) {
      const auto req = parse_body(body);
      if (!req) return bad_body();
      const auto stress = int_field(*req, "stress");
      const auto personal = int_field(*req, "personal");
      const auto meaningful = int_field(*req, "meaningful");
      if (!stress || !personal || !meaningful) return bad_body();
      auto next = interviewer_.submit_post_ratings(record.state, *stress, *personal, *meaningful);
      save(record, next);
      store_.update_baseline([&](const std::optional<BaselineStats>& current) {
        const auto base = current.value_or(BaselineStats::cold_start(content_.lexicon));
        if (base.contributors.count(next.session_id) != 0) return base;
        return update_baseline(base, next, content_.lexicon);
      });
      return api_ok(json{{"feedback_ready", true}});
    });
  }

  /// GET /api/session/{id}/feedback
  ApiResponse feedback(std::string_view id) {
    return with_session(id, [&](const SessionRecord& record) {
      const auto baseline =
          store_.baseline().value_or(BaselineStats::cold_start(content_.lexicon));
      return api_ok(report_to_json(
          build_report(record.state, content_.lexicon, baseline, content_.resources)));
    });
  }

  void mount(httplib::Server& server) {
    const auto reply = [](httplib::Response& res, const ApiResponse& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server.Post("/api/session", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, create_session());
    });
    server.Get(R"(/api/session/([^/]+))",
               [this, reply](const httplib::Request& req, httplib::Response& res) {
                 reply(res, get_session(req.matches[1].str()));
               });
    server.Post(R"(/api/session/([^/]+)/pre-ratings)",
                [this, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, submit_pre_ratings(req.matches[1].str(), req.body));
                });
    server.Post(R"(/api/session/([^/]+)/message)",
                [this, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, submit_message(req.matches[1].str(), req.body));
                });
    server.Post(R"(/api/session/([^/]+)/post-ratings)",
                [this, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, submit_post_ratings(req.matches[1].str(), req.body));
                });
    server.Get(R"(/api/session/([^/]+)/feedback)",
               [this, reply](const httplib::Request& req, httplib::Response& res) {
                 reply(res, feedback(req.matches[1].str()));
               });
  }

 private:
  template <typename F>
  ApiResponse guarded(F&& f) {
    try {
      return f();
    } catch (const SessionError& e) {
      switch (e.code()) {
        case SessionErrc::wrong_phase: return api_error(409, "wrong_phase", e.what());
        case SessionErrc::invalid_rating: return api_error(422, "invalid_rating", e.what());
        case SessionErrc::empty_message: return api_error(422, "empty_message", e.what());
      }
      return api_error(500, "internal_error", e.what());
    } catch (const StoreError& e) {
      if (e.code() == StoreErrc::phase_regression) {
        return api_error(409, "wrong_phase", e.what());
      }
      return api_error(500, "storage_error", e.what());
    } catch (const std::exception& e) {
      return api_error(500, "internal_error", e.what());
    }
  }

  std::shared_ptr<std::mutex> session_lock(const std::string& id) {
    std::lock_guard lock(locks_mutex_);
    auto& m = locks_[id];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
  }

  template <typename F>
  ApiResponse with_session(std::string_view id, F&& f) {
    if (!valid_session_id(id)) return api_error(404, "not_found", "unknown session");
    const std::string key(id);
    const auto lock_ptr = session_lock(key);
    std::lock_guard lock(*lock_ptr);
    return guarded([&] {
      const auto record = store_.get_session(key);
      if (!record) return api_error(404, "not_found", "unknown session");
      return f(*record);
    });
  }

  std::int64_t elapsed(const SessionRecord& record) const {
    return std::max<std::int64_t>(0, hooks_.now_ms() - record.created_at_ms);
  }

  void save(const SessionRecord& old, const SessionState& next) {
    store_.put_session(make_record(next, old.created_at_ms));
  }

  static std::optional<json> parse_body(std::string_view body) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
  }

  static std::optional<int> int_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) return std::nullopt;
    const auto v = j.at(key).get<std::int64_t>();
    // Out-of-range values still reach rating validation (422), not int overflow.
    return static_cast<int>(std::clamp<std::int64_t>(v, -1000, 1000));
  }

  static ApiResponse bad_body() {
    return api_error(422, "invalid_body", "request body is missing required fields");
  }

  const InterviewContent& content_;
  SessionStore& store_;
  ServiceHooks hooks_;
  TypingHints hints_;
  Interviewer interviewer_;
  std::mutex locks_mutex_;
  std::unordered_map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace ei
