#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ei/dialogue.hpp"
#include "ei/serialization.hpp"
#include "ei/service.hpp"
#include "ei/store.hpp"
#include "oracles.hpp"

namespace fixtures {

inline const ei::InterviewContent& content() {
  static const ei::InterviewContent c = ei::InterviewContent::load(
      std::string(EI_DATA_DIR) + "/lexicon.txt", std::string(EI_DATA_DIR) + "/reflections.txt",
      std::string(EI_DATA_DIR) + "/resources.txt");
  return c;
}

inline std::string test_id(std::uint64_t n) { return ei::format_session_id(0x7e57, n); }

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("ei-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

/// Single-word tokens derived from the lexicon, with the categories each one
/// hits according to the oracle matcher.
struct WordBank {
  std::map<std::string, std::set<std::string>> hits;
  std::vector<std::string> neutral;

  /// Words hitting `category` and nothing else in `groups`.
  std::vector<std::string> exclusive(const std::string& category,
                                     const std::vector<ei::Group>& groups) const {
    const auto& lex = content().lexicon;
    std::vector<std::string> out;
    for (const auto& [word, cats] : hits) {
      if (cats.count(category) == 0) continue;
      bool clean = true;
      for (const auto& c : cats) {
        if (c == category) continue;
        const auto* cat = lex.find(c);
        for (auto g : groups) clean = clean && cat->group != g;
      }
      if (clean) out.push_back(word);
    }
    return out;
  }
};

inline const WordBank& word_bank() {
  static const WordBank bank = [] {
    WordBank b;
    const auto& lex = content().lexicon;
    std::vector<std::string> candidates;
    for (const auto& c : lex.categories()) {
      for (const auto& e : c.entries) {
        if (e.wildcard) {
          for (const char* suffix : {"", "s", "ed", "ing"}) candidates.push_back(e.pattern + suffix);
        } else {
          candidates.push_back(e.pattern);
        }
      }
    }
    for (const auto& w : candidates) {
      if (oracle::tokenize_ascii(w) != std::vector<std::string>{w}) continue;
      for (const auto& [cat, n] : oracle::count({w}, lex)) {
        if (n > 0) b.hits[w].insert(cat);
      }
    }
    for (const char* w : {"ok", "the", "table", "blue", "tree", "window", "maybe", "then",
                          "quite", "river", "paper", "seven", "green", "walk", "chair"}) {
      bool none = true;
      for (const auto& [cat, n] : oracle::count({w}, lex)) none = none && n == 0;
      if (none) b.neutral.emplace_back(w);
    }
    return b;
  }();
  return bank;
}

inline std::string neutral_words(std::size_t n, std::size_t offset = 0) {
  const auto& words = word_bank().neutral;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += words[(i + offset) % words.size()];
  }
  return out;
}

struct Ratings {
  int life = 4;
  int stress_before = 4;
  int stress_after = 4;
  int personal = 4;
  int meaningful = 4;
};

/// Drives one interview from pre-ratings to feedback. `messages` holds the
/// eight user turns (answer, reply) x 4; `gaps_ms` the delay before each one.
inline ei::SessionState run_interview(const ei::Interviewer& interviewer, std::uint64_t seed,
                                      const std::string& id,
                                      const std::vector<std::string>& messages,
                                      const Ratings& ratings,
                                      const std::vector<std::int64_t>& gaps_ms = {}) {
  auto s = ei::start_session(seed, id);
  std::int64_t t = 1000;
  s = interviewer.submit_pre_ratings(s, ratings.life, ratings.stress_before, t);
  for (std::size_t i = 0; i < messages.size(); ++i) {
    t += i < gaps_ms.size() ? gaps_ms[i] : 5000;
    s = interviewer.submit_message(s, messages[i], t).state;
  }
  return interviewer.submit_post_ratings(s, ratings.stress_after, ratings.personal,
                                         ratings.meaningful);
}

/// 200 completed sessions: a full factorial design over five rating factors
/// in which only meaningful~personal (positive) and meaningful~delta stress
/// (negative) are related; every other rating pair has rho exactly 0.
inline std::vector<ei::SessionRecord> planted_corpus() {
  const auto& c = content();
  const ei::Interviewer interviewer(c.lexicon, c.reflections);
  const std::array<int, 5> levels{2, 3, 4, 5, 6};
  std::vector<ei::SessionRecord> out;
  std::uint64_t n = 0;
  for (int a = 0; a < 10; ++a) {
    for (int bi = 0; bi < 5; ++bi) {
      for (int cm = 0; cm < 2; ++cm) {
        for (int d = 0; d < 2; ++d) {
          Ratings r;
          r.life = 1 + a % 7;
          r.stress_before = levels[static_cast<std::size_t>(bi)];
          r.meaningful = cm == 0 ? 2 : 6;
          r.personal = 2 + 2 * (cm + d);
          int sa_index = bi;
          if (cm == 1 && d == 0) sa_index = (bi + 4) % 5;
          if (cm == 0 && d == 1) sa_index = (bi + 1) % 5;
          r.stress_after = levels[static_cast<std::size_t>(sa_index)];

          std::vector<std::string> messages;
          std::vector<std::int64_t> gaps;
          for (std::size_t p = 0; p < 4; ++p) {
            const std::size_t words = 6 + (n * 7 + p * 3) % 17;
            messages.push_back(neutral_words(words, n + p));
            gaps.push_back(2000 + 400 * static_cast<std::int64_t>(words));
            messages.push_back(neutral_words(5, n));
            gaps.push_back(3000);
          }
          const auto state =
              run_interview(interviewer, 1000 + n, test_id(n + 1), messages, r, gaps);
          out.push_back(ei::make_record(state, 1'600'000'000'000 + static_cast<std::int64_t>(n)));
          ++n;
        }
      }
    }
  }
  return out;
}

/// Clock and id hooks that replay the same sequence for every instance
/// sharing `clock`.
inline ei::ServiceHooks fixed_hooks(std::shared_ptr<std::int64_t> clock, std::uint64_t seed,
                                    std::string id) {
  return ei::ServiceHooks{[clock] { return *clock += 1500; }, [seed] { return seed; },
                          [id] { return id; }};
}

}  // namespace fixtures
