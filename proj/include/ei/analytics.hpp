#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ei/detail/random.hpp"
#include "ei/dialogue.hpp"
#include "ei/serialization.hpp"

namespace ei {

// ---------------------------------------------------------------------------
// Per-session engagement summaries
// ---------------------------------------------------------------------------

struct SessionSummary {
  std::string session_id;
  RatingSet ratings;
  std::optional<int> delta_stress;
  std::array<PromptId, 3> prompt_order{};
  // Main answer to each prompt.
  std::map<PromptId, std::int64_t> answer_words;
  std::map<PromptId, double> answer_seconds;
  // Reply to the reflection that followed each prompt's answer.
  std::map<PromptId, std::int64_t> reply_words;
  std::map<PromptId, double> reply_seconds;
  // All user turns, answers and replies.
  std::int64_t total_words = 0;
  // First prompt shown to last user turn.
  double total_seconds = 0.0;
  std::vector<std::string> reflections;
};

/// Summarizes one completed interview. Throws ValidationError when the
/// transcript does not have the complete four-prompt structure.
inline SessionSummary summarize_session(const SessionState& s) {
  if (!s.completed()) throw ValidationError("session is not completed");
  if (auto err = structure_error(s)) throw ValidationError(*err);
  SessionSummary out;
  out.session_id = s.session_id;
  out.ratings = s.ratings;
  out.delta_stress = s.ratings.delta_stress();
  out.prompt_order = s.prompt_order;
  const auto seq = s.prompt_sequence();
  for (std::size_t p = 0; p < seq.size(); ++p) {
    const auto& prompt = s.turns[4 * p];
    const auto& answer = s.turns[4 * p + 1];
    const auto& reflection = s.turns[4 * p + 2];
    const auto& reply = s.turns[4 * p + 3];
    out.answer_words[seq[p]] = answer.word_count;
    out.answer_seconds[seq[p]] = static_cast<double>(answer.timestamp_ms - prompt.timestamp_ms) / 1000.0;
    out.reply_words[seq[p]] = reply.word_count;
    out.reply_seconds[seq[p]] =
        static_cast<double>(reply.timestamp_ms - reflection.timestamp_ms) / 1000.0;
    out.total_words += answer.word_count + reply.word_count;
    out.reflections.push_back(reflection.triggered_by);
  }
  out.total_seconds =
      static_cast<double>(s.turns.back().timestamp_ms - s.turns.front().timestamp_ms) / 1000.0;
  return out;
}

struct SummarizeResult {
  std::vector<SessionSummary> summaries;
  std::size_t skipped_incomplete = 0;
  std::size_t skipped_corrupt = 0;
};

/// Summaries of the completed sessions; incomplete ones are skipped and
/// structurally broken ones counted as corrupt.
inline SummarizeResult summarize(const std::vector<SessionRecord>& records) {
  SummarizeResult result;
  for (const auto& r : records) {
    if (!r.state.completed()) {
      ++result.skipped_incomplete;
      continue;
    }
    try {
      result.summaries.push_back(summarize_session(r.state));
    } catch (const ValidationError&) {
      ++result.skipped_corrupt;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Spearman rank correlation with a permutation test
// ---------------------------------------------------------------------------

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

enum class CorrelationStatus { ok, insufficient_n, zero_variance };

constexpr std::string_view to_string(CorrelationStatus s) {
  switch (s) {
    case CorrelationStatus::ok: return "ok";
    case CorrelationStatus::insufficient_n: return "insufficient_n";
    case CorrelationStatus::zero_variance: return "zero_variance";
  }
  return "";
}

struct CorrelationResult {
  std::string variable_a;
  std::string variable_b;
  std::optional<double> rho;
  std::optional<double> p_value;
  std::size_t n = 0;
  CorrelationStatus status = CorrelationStatus::ok;

  bool significant(double alpha = 0.05) const { return p_value && *p_value < alpha; }
};

struct SpearmanOptions {
  std::size_t permutations = 10000;
  std::uint64_t seed = 20200601;
};

inline constexpr std::size_t kMinCorrelationN = 3;

/// Spearman's rho as the Pearson correlation of average ranks. The two-sided
/// p-value comes from a seeded permutation test: the share of label
/// shuffles whose |rho| reaches the observed one, with the usual +1
/// correction so it is never zero.
inline CorrelationResult spearman(std::span<const double> x, std::span<const double> y,
                                  const SpearmanOptions& options = {}) {
  if (x.size() != y.size()) throw ValidationError("spearman inputs differ in length");
  CorrelationResult r;
  r.n = x.size();
  if (r.n < kMinCorrelationN) {
    r.status = CorrelationStatus::insufficient_n;
    return r;
  }
  const auto xr = average_ranks(x);
  const auto yr = average_ranks(y);
  const double mean = (static_cast<double>(r.n) + 1.0) / 2.0;
  std::vector<double> xc(r.n), yc(r.n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < r.n; ++i) {
    xc[i] = xr[i] - mean;
    yc[i] = yr[i] - mean;
    sxx += xc[i] * xc[i];
    syy += yc[i] * yc[i];
    sxy += xc[i] * yc[i];
  }
  if (sxx == 0.0 || syy == 0.0) {
    r.status = CorrelationStatus::zero_variance;
    return r;
  }
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  if (options.permutations > 0) {
    std::mt19937_64 rng(options.seed);
    const double observed = std::abs(sxy);
    const double tol = 1e-9 * std::max(1.0, std::sqrt(sxx * syy));
    std::size_t extreme = 0;
    for (std::size_t m = 0; m < options.permutations; ++m) {
      detail::shuffle(yc.begin(), yc.end(), rng);
      double s = 0;
      for (std::size_t i = 0; i < r.n; ++i) s += xc[i] * yc[i];
      if (std::abs(s) >= observed - tol) ++extreme;
    }
    r.p_value = static_cast<double>(extreme + 1) / static_cast<double>(options.permutations + 1);
  }
  return r;
}

/// Keeps only the pairs where both values are present.
inline std::pair<std::vector<double>, std::vector<double>> complete_pairs(
    const std::vector<std::optional<double>>& x, const std::vector<std::optional<double>>& y) {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] && y[i]) {
      out.first.push_back(*x[i]);
      out.second.push_back(*y[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reflection dominance by stress outcome
// ---------------------------------------------------------------------------

struct DominanceRatio {
  std::string reflection_id;
  double dominance_decreased = 0.0;
  double dominance_increased = 0.0;
  // decreased / increased; > 1 means associated with a stress decrease.
  std::optional<double> ratio;
};

struct DominanceAnalysis {
  std::vector<DominanceRatio> ratios;
  std::size_t decreased_sessions = 0;
  std::size_t increased_sessions = 0;
  std::optional<std::string> diagnostic;
};

/// Splits sessions by the sign of their stress change (no change is left
/// out), takes each reflection's share of all reflections triggered in each
/// group and divides the two shares.
inline DominanceAnalysis dominance_ratios(const std::vector<SessionSummary>& summaries) {
  DominanceAnalysis out;
  std::map<std::string, std::int64_t> dec, inc;
  std::int64_t dec_total = 0, inc_total = 0;
  for (const auto& s : summaries) {
    if (!s.delta_stress || *s.delta_stress == 0) continue;
    const bool decreased = *s.delta_stress < 0;
    (decreased ? out.decreased_sessions : out.increased_sessions) += 1;
    for (const auto& id : s.reflections) {
      ++(decreased ? dec : inc)[id];
      ++(decreased ? dec_total : inc_total);
    }
  }
  std::map<std::string, DominanceRatio> by_id;
  for (const auto& [id, n] : dec) {
    by_id[id].dominance_decreased = static_cast<double>(n) / static_cast<double>(dec_total);
  }
  for (const auto& [id, n] : inc) {
    by_id[id].dominance_increased = static_cast<double>(n) / static_cast<double>(inc_total);
  }
  const bool both = dec_total > 0 && inc_total > 0;
  if (dec_total == 0) out.diagnostic = "no reflections in the decreased-stress group";
  if (inc_total == 0) {
    out.diagnostic = dec_total == 0 ? "no sessions with a stress change"
                                    : "no reflections in the increased-stress group";
  }
  for (auto& [id, d] : by_id) {
    d.reflection_id = id;
    if (both && d.dominance_increased > 0.0) {
      d.ratio = d.dominance_decreased / d.dominance_increased;
    }
    out.ratios.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

struct Histogram {
  std::string name;
  double lower = 0.0;
  double bin_width = 1.0;
  std::vector<std::size_t> counts;

  std::vector<double> edges() const {
    std::vector<double> e;
    for (std::size_t i = 0; i <= counts.size(); ++i) {
      e.push_back(lower + bin_width * static_cast<double>(i));
    }
    return e;
  }
};

/// Equal-width bins spanning [min, max]; the last bin is closed.
inline Histogram make_histogram(std::string name, const std::vector<double>& values,
                                std::size_t bins = 10) {
  Histogram h;
  h.name = std::move(name);
  if (values.empty() || bins == 0) return h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.lower = *lo;
  h.bin_width = *hi > *lo ? (*hi - *lo) / static_cast<double>(bins) : 1.0;
  if (*hi == *lo) bins = 1;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.lower) / h.bin_width);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Corpus report
// ---------------------------------------------------------------------------

enum class RatingVar { life_satisfaction, stress_before, stress_after, delta_stress, personal,
                       meaningful };

constexpr std::string_view to_string(RatingVar v) {
  switch (v) {
    case RatingVar::life_satisfaction: return "life_satisfaction";
    case RatingVar::stress_before: return "stress_before";
    case RatingVar::stress_after: return "stress_after";
    case RatingVar::delta_stress: return "delta_stress";
    case RatingVar::personal: return "personal";
    case RatingVar::meaningful: return "meaningful";
  }
  return "";
}

constexpr std::string_view label(RatingVar v) {
  switch (v) {
    case RatingVar::life_satisfaction: return "Life satisfaction";
    case RatingVar::stress_before: return "Stress before";
    case RatingVar::stress_after: return "Stress after";
    case RatingVar::delta_stress: return "Delta stress";
    case RatingVar::personal: return "Personal";
    case RatingVar::meaningful: return "Meaningful";
  }
  return "";
}

inline std::optional<double> rating_value(const SessionSummary& s, RatingVar v) {
  std::optional<int> r;
  switch (v) {
    case RatingVar::life_satisfaction: r = s.ratings.life_satisfaction; break;
    case RatingVar::stress_before: r = s.ratings.stress_before; break;
    case RatingVar::stress_after: r = s.ratings.stress_after; break;
    case RatingVar::delta_stress: r = s.delta_stress; break;
    case RatingVar::personal: r = s.ratings.personal; break;
    case RatingVar::meaningful: r = s.ratings.meaningful; break;
  }
  if (!r) return std::nullopt;
  return static_cast<double>(*r);
}

/// Rating pairs of the rating correlation table, grouped by first variable.
inline constexpr std::array<std::pair<RatingVar, RatingVar>, 12> kRatingPairs{{
    {RatingVar::life_satisfaction, RatingVar::stress_before},
    {RatingVar::life_satisfaction, RatingVar::stress_after},
    {RatingVar::life_satisfaction, RatingVar::delta_stress},
    {RatingVar::life_satisfaction, RatingVar::personal},
    {RatingVar::life_satisfaction, RatingVar::meaningful},
    {RatingVar::meaningful, RatingVar::stress_before},
    {RatingVar::meaningful, RatingVar::stress_after},
    {RatingVar::meaningful, RatingVar::delta_stress},
    {RatingVar::meaningful, RatingVar::personal},
    {RatingVar::personal, RatingVar::stress_before},
    {RatingVar::personal, RatingVar::stress_after},
    {RatingVar::personal, RatingVar::delta_stress},
}};

inline constexpr std::array<RatingVar, 6> kEngagementRows{
    RatingVar::life_satisfaction, RatingVar::personal,     RatingVar::meaningful,
    RatingVar::stress_before,     RatingVar::stress_after, RatingVar::delta_stress};

inline constexpr std::array<PromptId, 4> kEngagementPrompts{
    PromptId::major_issues, PromptId::grateful, PromptId::looking_forward,
    PromptId::advice_to_others};

enum class EngagementMeasure { length_words, duration_seconds };

struct EngagementTable {
  EngagementMeasure measure = EngagementMeasure::length_words;
  // Four prompt columns followed by "overall".
  std::vector<std::string> columns;
  // rows[i][j]: rating kEngagementRows[i] against columns[j].
  std::vector<std::vector<CorrelationResult>> rows;
};

struct AnalyticsReport {
  std::size_t sessions = 0;
  std::size_t skipped_incomplete = 0;
  std::size_t skipped_corrupt = 0;
  std::vector<CorrelationResult> rating_correlations;
  EngagementTable length_table;
  EngagementTable duration_table;
  DominanceAnalysis dominance;
  std::vector<Histogram> histograms;
};

struct ReportOptions {
  SpearmanOptions spearman;
  std::size_t histogram_bins = 10;
};

class AnalyticsError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline CorrelationResult correlate(const std::vector<std::optional<double>>& a,
                                   const std::vector<std::optional<double>>& b,
                                   std::string name_a, std::string name_b,
                                   const SpearmanOptions& options) {
  const auto [x, y] = complete_pairs(a, b);
  auto r = spearman(x, y, options);
  r.variable_a = std::move(name_a);
  r.variable_b = std::move(name_b);
  return r;
}

inline std::vector<std::optional<double>> rating_column(const std::vector<SessionSummary>& ss,
                                                        RatingVar v) {
  std::vector<std::optional<double>> out;
  for (const auto& s : ss) out.push_back(rating_value(s, v));
  return out;
}

inline EngagementTable engagement_table(const std::vector<SessionSummary>& ss,
                                        EngagementMeasure measure,
                                        const SpearmanOptions& options) {
  EngagementTable t;
  t.measure = measure;
  std::vector<std::vector<std::optional<double>>> cols;
  for (auto p : kEngagementPrompts) {
    t.columns.emplace_back(to_string(p));
    std::vector<std::optional<double>> col;
    for (const auto& s : ss) {
      col.push_back(measure == EngagementMeasure::length_words
                        ? static_cast<double>(s.answer_words.at(p))
                        : s.answer_seconds.at(p));
    }
    cols.push_back(std::move(col));
  }
  t.columns.emplace_back("overall");
  std::vector<std::optional<double>> overall;
  for (const auto& s : ss) {
    overall.push_back(measure == EngagementMeasure::length_words
                          ? static_cast<double>(s.total_words)
                          : s.total_seconds);
  }
  cols.push_back(std::move(overall));
  for (auto v : kEngagementRows) {
    std::vector<CorrelationResult> row;
    const auto ratings = rating_column(ss, v);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      row.push_back(correlate(ratings, cols[c], std::string(to_string(v)), t.columns[c], options));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace detail

inline AnalyticsReport build_analytics_report(const std::vector<SessionRecord>& records,
                                              const ReportOptions& options = {}) {
  if (records.empty()) throw AnalyticsError("corpus is empty");
  auto summary = summarize(records);
  if (summary.summaries.empty()) throw AnalyticsError("corpus has no completed sessions");
  const auto& ss = summary.summaries;

  AnalyticsReport rep;
  rep.sessions = ss.size();
  rep.skipped_incomplete = summary.skipped_incomplete;
  rep.skipped_corrupt = summary.skipped_corrupt;
  for (auto [a, b] : kRatingPairs) {
    rep.rating_correlations.push_back(
        detail::correlate(detail::rating_column(ss, a), detail::rating_column(ss, b),
                          std::string(to_string(a)), std::string(to_string(b)), options.spearman));
  }
  rep.length_table = detail::engagement_table(ss, EngagementMeasure::length_words, options.spearman);
  rep.duration_table =
      detail::engagement_table(ss, EngagementMeasure::duration_seconds, options.spearman);
  rep.dominance = dominance_ratios(ss);

  std::vector<double> words, seconds, response_words, response_seconds;
  for (const auto& s : ss) {
    words.push_back(static_cast<double>(s.total_words));
    seconds.push_back(s.total_seconds);
    for (auto p : kAllPrompts) {
      response_words.push_back(static_cast<double>(s.answer_words.at(p)));
      response_seconds.push_back(s.answer_seconds.at(p));
    }
  }
  rep.histograms.push_back(make_histogram("session_words", words, options.histogram_bins));
  rep.histograms.push_back(make_histogram("session_seconds", seconds, options.histogram_bins));
  rep.histograms.push_back(make_histogram("response_words", response_words, options.histogram_bins));
  rep.histograms.push_back(
      make_histogram("response_seconds", response_seconds, options.histogram_bins));
  return rep;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline constexpr double kSignificanceLevel = 0.05;

inline json correlation_to_json(const CorrelationResult& r) {
  return json{{"variable_a", r.variable_a},
              {"variable_b", r.variable_b},
              {"rho", r.rho ? json(*r.rho) : json(nullptr)},
              {"p_value", r.p_value ? json(*r.p_value) : json(nullptr)},
              {"n", r.n},
              {"status", to_string(r.status)},
              {"significant", r.significant(kSignificanceLevel)}};
}

inline json engagement_to_json(const EngagementTable& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    json cells = json::array();
    for (const auto& c : t.rows[i]) cells.push_back(correlation_to_json(c));
    rows.push_back(json{{"rating", to_string(kEngagementRows[i])}, {"cells", cells}});
  }
  return json{{"measure", t.measure == EngagementMeasure::length_words ? "length_words"
                                                                       : "duration_seconds"},
              {"columns", t.columns},
              {"rows", rows}};
}

inline json analytics_to_json(const AnalyticsReport& r) {
  json ratings = json::array();
  for (const auto& c : r.rating_correlations) ratings.push_back(correlation_to_json(c));
  json dom = json::array();
  for (const auto& d : r.dominance.ratios) {
    dom.push_back(json{{"reflection_id", d.reflection_id},
                       {"dominance_decreased", d.dominance_decreased},
                       {"dominance_increased", d.dominance_increased},
                       {"ratio", d.ratio ? json(*d.ratio) : json(nullptr)}});
  }
  json hists = json::array();
  for (const auto& h : r.histograms) {
    hists.push_back(json{{"name", h.name}, {"edges", h.edges()}, {"counts", h.counts}});
  }
  return json{
      {"notes",
       {{"significance", "two-sided permutation test, p < 0.05"},
        {"delta_stress", "stress_after - stress_before"},
        {"overall_length", "sum of words over all user turns (answers and reflection replies)"},
        {"prompt_duration", "seconds from prompt display to the user's main answer"},
        {"overall_duration", "seconds from the first prompt to the last user turn"}}},
      {"sessions", r.sessions},
      {"skipped_incomplete", r.skipped_incomplete},
      {"skipped_corrupt", r.skipped_corrupt},
      {"rating_correlations", ratings},
      {"length_correlations", engagement_to_json(r.length_table)},
      {"duration_correlations", engagement_to_json(r.duration_table)},
      {"reflection_dominance",
       {{"decreased_sessions", r.dominance.decreased_sessions},
        {"increased_sessions", r.dominance.increased_sessions},
        {"diagnostic", r.dominance.diagnostic ? json(*r.dominance.diagnostic) : json(nullptr)},
        {"ratios", dom}}},
      {"histograms", hists}};
}

namespace detail {

inline std::string format_cell(const CorrelationResult& r) {
  char buf[32];
  if (r.status == CorrelationStatus::insufficient_n) return "n<3";
  if (!r.rho) return "n/a";
  std::snprintf(buf, sizeof buf, "%.3f%s", *r.rho, r.significant(kSignificanceLevel) ? "*" : "");
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Plain-text tables; '*' marks p < 0.05.
inline std::string analytics_to_table(const AnalyticsReport& r) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Sessions analyzed: %zu (skipped: %zu incomplete, %zu corrupt)\n\n",
                r.sessions, r.skipped_incomplete, r.skipped_corrupt);
  out += buf;
  out += "Rating correlations (Spearman rho, * = p < 0.05)\n";
  out += detail::pad("Rating 1", 20) + detail::pad("Rating 2", 20) + detail::pad("rho", 10) +
         "p\n";
  for (std::size_t i = 0; i < r.rating_correlations.size(); ++i) {
    const auto& c = r.rating_correlations[i];
    const auto [a, b] = kRatingPairs[i];
    std::string p = "-";
    if (c.p_value) {
      std::snprintf(buf, sizeof buf, "%.4f", *c.p_value);
      p = buf;
    }
    out += detail::pad(std::string(label(a)), 20) + detail::pad(std::string(label(b)), 20) +
           detail::pad(detail::format_cell(c), 10) + p + "\n";
  }
  for (const auto* t : {&r.length_table, &r.duration_table}) {
    out += t->measure == EngagementMeasure::length_words ? "\nLength in words\n"
                                                         : "\nDuration in seconds\n";
    out += detail::pad("", 20);
    for (const auto& c : t->columns) out += detail::pad(c, 18);
    out += "\n";
    for (std::size_t i = 0; i < t->rows.size(); ++i) {
      out += detail::pad(std::string(label(kEngagementRows[i])), 20);
      for (const auto& c : t->rows[i]) out += detail::pad(detail::format_cell(c), 18);
      out += "\n";
    }
  }
  out += "\nReflection dominance (decreased / increased stress)\n";
  if (r.dominance.diagnostic) out += "note: " + *r.dominance.diagnostic + "\n";
  for (const auto& d : r.dominance.ratios) {
    std::string ratio = "-";
    if (d.ratio) {
      std::snprintf(buf, sizeof buf, "%.3f", *d.ratio);
      ratio = buf;
    }
    std::snprintf(buf, sizeof buf, "%-20s %8.3f %8.3f  %s\n", d.reflection_id.c_str(),
                  d.dominance_decreased, d.dominance_increased, ratio.c_str());
    out += buf;
  }
  out += "\nHistograms\n";
  for (const auto& h : r.histograms) {
    std::snprintf(buf, sizeof buf, "%-18s from %.1f, width %.2f:", h.name.c_str(), h.lower,
                  h.bin_width);
    out += buf;
    for (auto c : h.counts) out += " " + std::to_string(c);
    out += "\n";
  }
  return out;
}

}  // namespace ei
