#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lyra/corpus.hpp"

namespace lyra {

enum class TextLanguage { fr, mo };

/// Registry of deterministic standardization rules, in default order:
///
///   quotes          « » “ ” → straight double quote; padding spaces inside
///                   guillemets are dropped.
///   ellipsis        "?..", "!...", "?…", "...?" → the bare ? or !.
///   spacing         exactly one space before ? ! ; : (French typography).
///                   A colon between two digits is left alone.
///   digits          standalone digit runs < 1,000,000 spelled out in French
///                   words. Applied only when the language is fr.
///   final_period    "." appended when the text ends in a letter or digit, or
///                   in a closing quote that follows a letter or digit.
///   whitespace      runs of whitespace (including no-break spaces) → one
///                   space; leading and trailing whitespace removed.
///
/// capitalize (uppercase the first letter of the text) is registered but not
/// part of the default list.
inline constexpr std::string_view kRuleQuotes = "quotes";
inline constexpr std::string_view kRuleEllipsis = "ellipsis";
inline constexpr std::string_view kRuleSpacing = "spacing";
inline constexpr std::string_view kRuleDigits = "digits";
inline constexpr std::string_view kRuleFinalPeriod = "final_period";
inline constexpr std::string_view kRuleWhitespace = "whitespace";
inline constexpr std::string_view kRuleCapitalize = "capitalize";

const std::vector<std::string_view>& registered_rules();
const std::vector<std::string_view>& default_rule_order();

class RuleConfig {
 public:
  /// Throws ValidationError for names missing from the registry or repeated.
  RuleConfig(std::vector<std::string> enabled_rules, TextLanguage language);

  static RuleConfig defaults(TextLanguage language);

  const std::vector<std::string>& enabled_rules() const noexcept { return rules_; }
  TextLanguage language() const noexcept { return language_; }
  bool enabled(std::string_view rule) const;

  /// Copy of this config with `rule` removed.
  RuleConfig without(std::string_view rule) const;

 private:
  std::vector<std::string> rules_;
  TextLanguage language_;
};

/// Per-rule hit counts for a single text (a rule "hits" when it changes the
/// text).
using RuleHits = std::map<std::string, std::int64_t>;

std::string standardize_text(std::string_view text, const RuleConfig& config,
                             RuleHits* hits = nullptr);

/// French cardinal words for 0 <= n < 1,000,000. Tens and units below one
/// hundred are hyphenated ("dix-neuf", "soixante-dix-sept") except in the
/// 80-99 range, which follows the "quatre vingt dix-sept" spacing. Throws
/// std::out_of_range otherwise.
std::string spell_number_fr(std::int64_t n);

struct PairDiff {
  std::string id;
  std::string field;  // language code
  std::string before;
  std::string after;
};

struct StandardizationReport {
  std::int64_t pairs_processed = 0;
  std::int64_t pairs_changed = 0;
  RuleHits rule_hits;
  std::vector<PairDiff> diffs;

  /// Human-readable per-rule counts followed by before/after diffs.
  std::string to_text() const;
};

struct StandardizedCorpus {
  Corpus corpus;
  StandardizationReport report;
};

/// Applies `config_src` to every source-side text and `config_tgt` to every
/// target-side text. Dictionary and conjugation entries are word-level, so
/// final_period and capitalize are skipped for them.
StandardizedCorpus standardize_corpus(const Corpus& corpus, const RuleConfig& config_src,
                                      const RuleConfig& config_tgt);

}  // namespace lyra
