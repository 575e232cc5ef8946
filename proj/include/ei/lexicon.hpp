#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "ei/category_profile.hpp"
#include "ei/detail/text.hpp"
#include "ei/error.hpp"
#include "ei/group.hpp"

namespace ei {

struct LexiconEntry {
  std::string pattern;
  bool wildcard = false;

  bool matches(std::string_view token) const {
    return wildcard ? detail::starts_with(token, pattern) : token == pattern;
  }

  std::string to_string() const { return wildcard ? pattern + "*" : pattern; }

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
  friend auto operator<=>(const LexiconEntry&, const LexiconEntry&) = default;
};

struct Category {
  std::string name;
  Group group = Group::topic;
  std::vector<LexiconEntry> entries;
  // Inline comment after the entries (including the whitespace before '#').
  std::string trailing_comment;

  friend bool operator==(const Category&, const Category&) = default;
};

struct RequiredCategory {
  Group group;
  std::string_view name;
};

/// Categories every lexicon must define. The interview logic, feedback pies
/// and scales all refer to them by name.
inline constexpr std::array<RequiredCategory, 17> kRequiredCategories{{
    {Group::topic, "finance"},     {Group::topic, "health"},     {Group::topic, "home"},
    {Group::topic, "work"},        {Group::topic, "family"},     {Group::topic, "friends"},
    {Group::topic, "politics"},    {Group::emotion, "anger"},    {Group::emotion, "anxiety"},
    {Group::emotion, "sadness"},   {Group::emotion, "joy"},      {Group::affect, "positive"},
    {Group::affect, "negative"},   {Group::pronoun, "i"},        {Group::pronoun, "we"},
    {Group::pronoun, "other"},     {Group::pronoun, "impersonal"},
}};

namespace detail {

inline bool valid_category_name(std::string_view s) {
  if (s.empty() || !(s.front() >= 'a' && s.front() <= 'z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

/// Returns an error message if `raw` is not a valid entry pattern.
inline std::optional<std::string> pattern_error(std::string_view raw) {
  if (raw.empty()) return "empty entry";
  std::string_view stem = raw;
  const bool wildcard = raw.back() == '*';
  if (wildcard) stem.remove_suffix(1);
  for (char c : stem) {
    if (is_space(c)) return "entry '" + std::string(raw) + "' contains whitespace";
    if (c >= 'A' && c <= 'Z') return "entry '" + std::string(raw) + "' is not lowercase";
    if (c == '*' || c == ',' || c == '#' || c == '|') {
      return "entry '" + std::string(raw) + "' contains '" + std::string(1, c) + "'";
    }
  }
  if (stem.empty()) return "empty entry";
  if (wildcard && stem.size() < 2) {
    return "wildcard stem of '" + std::string(raw) + "' is shorter than 2 characters";
  }
  // The tokenizer strips edge punctuation, so such an entry could never match.
  if (is_ascii_punct(stem.front()) || is_ascii_punct(stem.back())) {
    return "entry '" + std::string(raw) + "' begins or ends with punctuation";
  }
  return std::nullopt;
}

}  // namespace detail

/// An immutable set of word categories.
///
/// The original file layout (comment lines, blank lines, category order) is
/// kept so that `serialize()` reproduces a canonically formatted file byte
/// for byte. Canonical means entries separated by ", ", a single TAB after
/// the category head and "\n" line endings.
class Lexicon {
 public:
  Lexicon() = default;

  /// Builds a lexicon from categories; validates like `load_lexicon`.
  static Lexicon from_categories(std::vector<Category> categories,
                                 std::string version = "unversioned") {
    Lexicon lex;
    lex.version_ = std::move(version);
    lex.layout_.emplace_back(std::string("# version: ") + lex.version_);
    for (std::size_t i = 0; i < categories.size(); ++i) lex.layout_.emplace_back(i);
    lex.categories_ = std::move(categories);
    lex.finalize();
    return lex;
  }

  const std::vector<Category>& categories() const noexcept { return categories_; }
  const std::string& version() const noexcept { return version_; }

  const Category* find(std::string_view name) const {
    for (const auto& c : categories_) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  std::vector<std::string> names_in(Group group) const {
    std::vector<std::string> out;
    for (const auto& c : categories_) {
      if (c.group == group) out.push_back(c.name);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// True if `token` hits category `index` (literal equality or wildcard prefix).
  bool category_matches(std::size_t index, std::string_view token) const {
    const auto& idx = index_[index];
    if (idx.literals.count(std::string(token)) != 0) return true;
    return std::any_of(idx.prefixes.begin(), idx.prefixes.end(),
                       [&](const std::string& p) { return detail::starts_with(token, p); });
  }

  std::string serialize() const {
    std::string out;
    for (const auto& item : layout_) {
      if (const auto* raw = std::get_if<std::string>(&item)) {
        out += *raw;
      } else {
        const auto& c = categories_[std::get<std::size_t>(item)];
        out += std::string(to_string(c.group)) + ":" + c.name + "\t";
        for (std::size_t i = 0; i < c.entries.size(); ++i) {
          if (i > 0) out += ", ";
          out += c.entries[i].to_string();
        }
        out += c.trailing_comment;
      }
      out += '\n';
    }
    return out;
  }

  friend Lexicon load_lexicon(std::string_view source);

 private:
  struct CategoryIndex {
    std::unordered_set<std::string> literals;
    std::vector<std::string> prefixes;
  };

  void finalize() {
    std::set<std::string, std::less<>> seen;
    for (const auto& c : categories_) {
      if (!detail::valid_category_name(c.name)) {
        throw ValidationError("invalid category name '" + c.name + "'");
      }
      if (!seen.insert(c.name).second) {
        throw ValidationError("duplicate category name '" + c.name + "'");
      }
      std::set<LexiconEntry> entries;
      for (const auto& e : c.entries) {
        if (auto err = detail::pattern_error(e.to_string())) {
          throw ValidationError("category '" + c.name + "': " + *err);
        }
        if (!entries.insert(e).second) {
          throw ValidationError("category '" + c.name + "': duplicate entry '" + e.to_string() +
                                "'");
        }
      }
    }
    for (const auto& req : kRequiredCategories) {
      const auto* c = find(req.name);
      if (c == nullptr) {
        throw ValidationError("missing required category '" + std::string(req.name) + "'");
      }
      if (c->group != req.group) {
        throw ValidationError("category '" + std::string(req.name) + "' must be in group '" +
                              std::string(to_string(req.group)) + "'");
      }
    }
    index_.clear();
    for (const auto& c : categories_) {
      CategoryIndex idx;
      for (const auto& e : c.entries) {
        if (e.wildcard) {
          idx.prefixes.push_back(e.pattern);
        } else {
          idx.literals.insert(e.pattern);
        }
      }
      index_.push_back(std::move(idx));
    }
  }

  std::vector<Category> categories_;
  std::vector<std::variant<std::string, std::size_t>> layout_;
  std::vector<CategoryIndex> index_;
  std::string version_ = "unversioned";
};

/// Parses a lexicon file: one `<group>:<name><TAB><entries>` line per
/// category, `#` comments, a trailing `*` marking a prefix wildcard. A
/// comment of the form `# version: <v>` sets the lexicon version.
///
/// Throws ParseError for malformed lines and ValidationError for missing
/// required categories or duplicate names.
inline Lexicon load_lexicon(std::string_view source) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(source)) {
    ++line_no;
    const auto content = detail::trim(line);
    if (content.empty() || content.front() == '#') {
      if (detail::starts_with(content, "# version:") && lex.version_ == "unversioned") {
        lex.version_ = std::string(detail::trim(content.substr(10)));
      }
      lex.layout_.emplace_back(std::string(line));
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(line_no, "expected TAB between category and entries");
    }
    const auto head = line.substr(0, tab);
    auto rest = line.substr(tab + 1);
    const auto colon = head.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "expected '<group>:<name>' before TAB");
    }
    const auto group = parse_group(head.substr(0, colon));
    if (!group) {
      throw ParseError(line_no, "unknown group '" + std::string(head.substr(0, colon)) + "'");
    }
    Category cat;
    cat.group = *group;
    cat.name = std::string(head.substr(colon + 1));
    if (!detail::valid_category_name(cat.name)) {
      throw ParseError(line_no, "invalid category name '" + cat.name + "'");
    }
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
      auto start = hash;
      while (start > 0 && detail::is_space(rest[start - 1])) --start;
      cat.trailing_comment = std::string(rest.substr(start));
      rest = rest.substr(0, start);
    }
    std::set<LexiconEntry> seen;
    for (auto raw : detail::split(rest, ',')) {
      raw = detail::trim(raw);
      if (auto err = detail::pattern_error(raw)) throw ParseError(line_no, *err);
      LexiconEntry e;
      e.wildcard = raw.back() == '*';
      e.pattern = std::string(e.wildcard ? raw.substr(0, raw.size() - 1) : raw);
      if (!seen.insert(e).second) {
        throw ParseError(line_no, "duplicate entry '" + std::string(raw) + "'");
      }
      cat.entries.push_back(std::move(e));
    }
    lex.layout_.emplace_back(lex.categories_.size());
    lex.categories_.push_back(std::move(cat));
  }
  lex.finalize();
  return lex;
}

inline Lexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_lexicon(ss.str());
}

/// Lowercased word tokens of one message.
struct TokenList {
  std::vector<std::string> tokens;

  std::size_t raw_length_words() const noexcept { return tokens.size(); }
};

namespace detail {

// Typographic punctuation that commonly wraps words in pasted or mobile text.
inline constexpr std::array<std::string_view, 10> kUtf8EdgePunct{
    "‘", "’", "“", "”", "…", "–", "—", "«", "»",
    "¿"};

inline bool strip_one_front(std::string_view& s) {
  if (s.empty()) return false;
  if (is_ascii_punct(s.front())) {
    s.remove_prefix(1);
    return true;
  }
  for (auto p : kUtf8EdgePunct) {
    if (starts_with(s, p)) {
      s.remove_prefix(p.size());
      return true;
    }
  }
  return false;
}

inline bool strip_one_back(std::string_view& s) {
  if (s.empty()) return false;
  if (is_ascii_punct(s.back())) {
    s.remove_suffix(1);
    return true;
  }
  for (auto p : kUtf8EdgePunct) {
    if (s.size() >= p.size() && s.substr(s.size() - p.size()) == p) {
      s.remove_suffix(p.size());
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Lowercases, splits on whitespace and strips leading/trailing punctuation
/// from each token. Internal apostrophes survive; curly apostrophes are
/// folded to ASCII first.
inline TokenList tokenize(std::string_view text) {
  std::string norm;
  norm.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 3, "’") == 0 || text.compare(i, 3, "‘") == 0) {
      norm += '\'';
      i += 2;
    } else {
      norm += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    }
  }
  TokenList out;
  std::string_view rest = norm;
  while (!rest.empty()) {
    std::size_t start = 0;
    while (start < rest.size() && detail::is_space(rest[start])) ++start;
    std::size_t end = start;
    while (end < rest.size() && !detail::is_space(rest[end])) ++end;
    auto word = rest.substr(start, end - start);
    rest.remove_prefix(end);
    while (detail::strip_one_front(word)) {
    }
    while (detail::strip_one_back(word)) {
    }
    if (!word.empty()) out.tokens.emplace_back(word);
  }
  return out;
}

/// Counts, for every category, the tokens matching any of its entries. A
/// token may count toward several categories.
inline CategoryProfile count_categories(const TokenList& tokens, const Lexicon& lexicon) {
  CategoryProfile profile;
  profile.total_tokens = static_cast<std::int64_t>(tokens.tokens.size());
  const auto& cats = lexicon.categories();
  std::vector<std::int64_t> counts(cats.size(), 0);
  for (const auto& t : tokens.tokens) {
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (lexicon.category_matches(i, t)) ++counts[i];
    }
  }
  for (std::size_t i = 0; i < cats.size(); ++i) {
    profile.counts.emplace(cats[i].name, counts[i]);
    profile.group_of.emplace(cats[i].name, cats[i].group);
  }
  return profile;
}

inline CategoryProfile analyze_text(std::string_view text, const Lexicon& lexicon) {
  return count_categories(tokenize(text), lexicon);
}

}  // namespace ei
