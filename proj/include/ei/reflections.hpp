#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ei/detail/text.hpp"
#include "ei/error.hpp"
#include "ei/lexicon.hpp"

namespace ei {

enum class PromptId { major_issues, looking_forward, advice_to_others, grateful };

inline constexpr std::array<PromptId, 4> kAllPrompts{PromptId::major_issues,
                                                     PromptId::looking_forward,
                                                     PromptId::advice_to_others,
                                                     PromptId::grateful};

constexpr std::string_view to_string(PromptId p) {
  switch (p) {
    case PromptId::major_issues: return "major_issues";
    case PromptId::looking_forward: return "looking_forward";
    case PromptId::advice_to_others: return "advice_to_others";
    case PromptId::grateful: return "grateful";
  }
  return "";
}

constexpr std::optional<PromptId> parse_prompt_id(std::string_view s) {
  for (auto p : kAllPrompts) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

struct Prompt {
  PromptId id = PromptId::major_issues;
  std::string text;
};

enum class TriggerKind { emotion, topic, impersonal, generic };

constexpr std::string_view to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::emotion: return "emotion";
    case TriggerKind::topic: return "topic";
    case TriggerKind::impersonal: return "impersonal";
    case TriggerKind::generic: return "generic";
  }
  return "";
}

struct Reflection {
  std::string id;
  TriggerKind trigger = TriggerKind::generic;
  // Lexicon category for emotion/topic triggers, empty otherwise.
  std::string category;
  std::string text;
  std::vector<std::string> resource_tags;

  std::string trigger_label() const {
    return category.empty() ? std::string(to_string(trigger))
                            : std::string(to_string(trigger)) + ":" + category;
  }
};

/// Interview wording: the four leading prompts, the reflection pool and the
/// message shown when the interview hands over to the closing ratings.
class ReflectionLibrary {
 public:
  const Prompt& prompt(PromptId id) const { return prompts_.at(static_cast<std::size_t>(id)); }
  const std::vector<Reflection>& reflections() const noexcept { return reflections_; }
  const std::string& closing_text() const noexcept { return closing_text_; }

  const Reflection* find(std::string_view id) const {
    for (const auto& r : reflections_) {
      if (r.id == id) return &r;
    }
    return nullptr;
  }

  const Reflection* for_category(TriggerKind kind, std::string_view category) const {
    for (const auto& r : reflections_) {
      if (r.trigger == kind && r.category == category) return &r;
    }
    return nullptr;
  }

  const Reflection* impersonal() const { return for_category(TriggerKind::impersonal, ""); }

  std::vector<const Reflection*> generics() const {
    std::vector<const Reflection*> out;
    for (const auto& r : reflections_) {
      if (r.trigger == TriggerKind::generic) out.push_back(&r);
    }
    return out;
  }

  friend ReflectionLibrary load_reflections(std::string_view source, const Lexicon& lexicon);

 private:
  std::array<Prompt, 4> prompts_{};
  std::vector<Reflection> reflections_;
  std::string closing_text_;
};

inline constexpr std::size_t kMinGenericReflections = 4;

/// Parses `id | trigger | text | resource_tags` records. Triggers are
/// `prompt`, `emotion:<category>`, `topic:<category>`, `impersonal`,
/// `generic` and `closing`. Categories and resource tags are checked against
/// the lexicon: every emotion and topic category needs exactly one reflection.
inline ReflectionLibrary load_reflections(std::string_view source, const Lexicon& lexicon) {
  ReflectionLibrary lib;
  std::set<std::string, std::less<>> ids;
  std::array<bool, 4> have_prompt{};
  bool have_closing = false;
  const auto topics = lexicon.names_in(Group::topic);

  std::size_t line_no = 0;
  for (auto line : detail::split_lines(source)) {
    ++line_no;
    const auto content = detail::trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto fields = detail::split(content, '|');
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 '|'-separated fields, found " +
                                    std::to_string(fields.size()));
    }
    const std::string id(detail::trim(fields[0]));
    const auto trigger = detail::trim(fields[1]);
    const std::string text(detail::trim(fields[2]));
    if (id.empty()) throw ParseError(line_no, "empty id");
    if (text.empty()) throw ParseError(line_no, "empty text for '" + id + "'");
    if (!ids.insert(id).second) throw ParseError(line_no, "duplicate id '" + id + "'");

    std::vector<std::string> tags;
    if (const auto raw_tags = detail::trim(fields[3]); !raw_tags.empty()) {
      for (auto t : detail::split(raw_tags, ',')) {
        const std::string tag(detail::trim(t));
        if (!std::binary_search(topics.begin(), topics.end(), tag)) {
          throw ParseError(line_no, "resource tag '" + tag + "' is not a topic category");
        }
        tags.push_back(tag);
      }
    }

    if (trigger == "prompt") {
      const auto pid = parse_prompt_id(id);
      if (!pid) throw ParseError(line_no, "unknown prompt id '" + id + "'");
      lib.prompts_[static_cast<std::size_t>(*pid)] = Prompt{*pid, text};
      have_prompt[static_cast<std::size_t>(*pid)] = true;
      continue;
    }
    if (trigger == "closing") {
      if (have_closing) throw ParseError(line_no, "more than one closing record");
      lib.closing_text_ = text;
      have_closing = true;
      continue;
    }

    Reflection r{id, TriggerKind::generic, "", text, std::move(tags)};
    if (trigger == "impersonal") {
      r.trigger = TriggerKind::impersonal;
    } else if (trigger == "generic") {
      r.trigger = TriggerKind::generic;
    } else if (const auto colon = trigger.find(':'); colon != std::string_view::npos) {
      const auto kind = trigger.substr(0, colon);
      r.category = std::string(trigger.substr(colon + 1));
      Group expected = Group::topic;
      if (kind == "emotion") {
        r.trigger = TriggerKind::emotion;
        expected = Group::emotion;
      } else if (kind == "topic") {
        r.trigger = TriggerKind::topic;
      } else {
        throw ParseError(line_no, "unknown trigger '" + std::string(trigger) + "'");
      }
      const auto* cat = lexicon.find(r.category);
      if (cat == nullptr || cat->group != expected) {
        throw ParseError(line_no, "trigger '" + std::string(trigger) +
                                      "' does not name a lexicon " +
                                      std::string(to_string(expected)) + " category");
      }
      if (lib.for_category(r.trigger, r.category) != nullptr) {
        throw ParseError(line_no, "second reflection for '" + std::string(trigger) + "'");
      }
    } else {
      throw ParseError(line_no, "unknown trigger '" + std::string(trigger) + "'");
    }
    if (r.trigger == TriggerKind::impersonal && lib.impersonal() != nullptr) {
      throw ParseError(line_no, "more than one impersonal reflection");
    }
    lib.reflections_.push_back(std::move(r));
  }

  for (auto p : kAllPrompts) {
    if (!have_prompt[static_cast<std::size_t>(p)]) {
      throw ValidationError("missing prompt '" + std::string(to_string(p)) + "'");
    }
  }
  if (!have_closing) throw ValidationError("missing closing record");
  for (auto [group, kind] : {std::pair{Group::emotion, TriggerKind::emotion},
                             std::pair{Group::topic, TriggerKind::topic}}) {
    for (const auto& name : lexicon.names_in(group)) {
      if (lib.for_category(kind, name) == nullptr) {
        throw ValidationError("no reflection for " + std::string(to_string(group)) +
                              " category '" + name + "'");
      }
    }
  }
  if (lib.impersonal() == nullptr) throw ValidationError("missing impersonal reflection");
  if (lib.generics().size() < kMinGenericReflections) {
    throw ValidationError("need at least " + std::to_string(kMinGenericReflections) +
                          " generic reflections");
  }
  return lib;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ReflectionLibrary load_reflections_file(const std::string& path, const Lexicon& lexicon) {
  return load_reflections(read_text_file(path), lexicon);
}

}  // namespace ei
