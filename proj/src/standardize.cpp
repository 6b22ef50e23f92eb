#include "lyra/standardize.hpp"

#include <algorithm>
#include <sstream>

#include "lyra/error.hpp"
#include "lyra/utf8.hpp"

namespace lyra {

namespace {

using utf8::is_digit;
using utf8::is_letter;
using utf8::is_space;

bool is_terminal_mark(char32_t cp) { return cp == U'?' || cp == U'!'; }
bool is_dot(char32_t cp) { return cp == U'.' || cp == U'…'; }
bool is_spaced_mark(char32_t cp) {
  return cp == U'?' || cp == U'!' || cp == U';' || cp == U':';
}
bool is_opening_quote(char32_t cp) { return cp == U'«' || cp == U'“'; }
bool is_closing_quote(char32_t cp) { return cp == U'»' || cp == U'”'; }
bool is_wordish(char32_t cp) {
  return is_letter(cp) || is_digit(cp) || utf8::is_combining(cp);
}

void pop_trailing_space(std::u32string& out) {
  while (!out.empty() && is_space(out.back())) out.pop_back();
}

std::u32string apply_quotes(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char32_t cp = in[i];
    if (is_opening_quote(cp)) {
      out.push_back(U'"');
      while (i + 1 < in.size() && is_space(in[i + 1])) ++i;
    } else if (is_closing_quote(cp)) {
      pop_trailing_space(out);
      out.push_back(U'"');
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

std::u32string apply_ellipsis(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (!is_terminal_mark(in[i]) && !is_dot(in[i])) {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t j = i;
    bool has_mark = false;
    bool has_dot = false;
    while (j < in.size() && (is_terminal_mark(in[j]) || is_dot(in[j]))) {
      has_mark = has_mark || is_terminal_mark(in[j]);
      has_dot = has_dot || is_dot(in[j]);
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) {
      if (!(has_mark && has_dot) || is_terminal_mark(in[k])) out.push_back(in[k]);
    }
    i = j;
  }
  return out;
}

std::u32string apply_spacing(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size() + 8);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char32_t cp = in[i];
    if (!is_spaced_mark(cp)) {
      out.push_back(cp);
      continue;
    }
    if (cp == U':') {
      const bool prev_digit = !out.empty() && is_digit(out.back());
      const bool next_digit = i + 1 < in.size() && is_digit(in[i + 1]);
      const bool next_slash = i + 1 < in.size() && in[i + 1] == U'/';
      if ((prev_digit && next_digit) || next_slash) {
        out.push_back(cp);
        continue;
      }
    }
    const std::size_t before = out.size();
    pop_trailing_space(out);
    const bool had_space = out.size() != before;
    if (!out.empty() && (had_space || !is_spaced_mark(out.back()))) out.push_back(U' ');
    out.push_back(cp);
  }
  return out;
}

bool separator_joins_digits(const std::u32string& s, std::size_t sep, bool forward) {
  static const std::u32string kSeparators = U".,:/";
  if (kSeparators.find(s[sep]) == std::u32string::npos) return false;
  if (forward) return sep + 1 < s.size() && is_digit(s[sep + 1]);
  return sep > 0 && is_digit(s[sep - 1]);
}

std::u32string apply_digits(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size() * 2);
  std::size_t i = 0;
  while (i < in.size()) {
    if (!is_digit(in[i])) {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < in.size() && is_digit(in[j])) ++j;
    const std::size_t len = j - i;
    bool convert = len <= 6 && (len == 1 || in[i] != U'0');
    if (convert && i > 0) {
      const char32_t prev = in[i - 1];
      if (is_letter(prev) || separator_joins_digits(in, i - 1, false)) convert = false;
    }
    if (convert && j < in.size()) {
      const char32_t next = in[j];
      if (is_letter(next) || separator_joins_digits(in, j, true)) convert = false;
    }
    if (convert) {
      std::int64_t value = 0;
      for (std::size_t k = i; k < j; ++k) value = value * 10 + (in[k] - U'0');
      out += utf8::decode(spell_number_fr(value));
    } else {
      out.append(in, i, len);
    }
    i = j;
  }
  return out;
}

std::u32string apply_final_period(const std::u32string& in) {
  std::size_t end = in.size();
  while (end > 0 && is_space(in[end - 1])) --end;
  if (end == 0) return in;
  const char32_t last = in[end - 1];
  bool add = is_wordish(last);
  if (!add && last == U'"' && end >= 2) add = is_wordish(in[end - 2]);
  if (!add) return in;
  std::u32string out = in.substr(0, end);
  out.push_back(U'.');
  out.append(in, end, std::u32string::npos);
  return out;
}

std::u32string apply_whitespace(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size());
  bool pending = false;
  for (char32_t cp : in) {
    if (is_space(cp)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(U' ');
    pending = false;
    out.push_back(cp);
  }
  return out;
}

std::u32string apply_capitalize(const std::u32string& in) {
  std::u32string out = in;
  for (auto& cp : out) {
    if (is_digit(cp)) break;
    if (is_letter(cp)) {
      cp = utf8::to_upper(cp);
      break;
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string_view>& registered_rules() {
  static const std::vector<std::string_view> rules = {
      kRuleQuotes, kRuleEllipsis,   kRuleSpacing,   kRuleDigits,
      kRuleFinalPeriod, kRuleWhitespace, kRuleCapitalize};
  return rules;
}

const std::vector<std::string_view>& default_rule_order() {
  static const std::vector<std::string_view> rules = {
      kRuleQuotes, kRuleEllipsis, kRuleSpacing, kRuleDigits, kRuleFinalPeriod, kRuleWhitespace};
  return rules;
}

RuleConfig::RuleConfig(std::vector<std::string> enabled_rules, TextLanguage language)
    : rules_(std::move(enabled_rules)), language_(language) {
  const auto& known = registered_rules();
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (std::find(known.begin(), known.end(), rules_[i]) == known.end()) {
      throw ValidationError("unknown standardization rule '" + rules_[i] + "'");
    }
    if (std::find(rules_.begin(), rules_.begin() + static_cast<std::ptrdiff_t>(i), rules_[i]) !=
        rules_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ValidationError("rule '" + rules_[i] + "' listed twice");
    }
  }
}

RuleConfig RuleConfig::defaults(TextLanguage language) {
  const auto& order = default_rule_order();
  return RuleConfig(std::vector<std::string>(order.begin(), order.end()), language);
}

bool RuleConfig::enabled(std::string_view rule) const {
  return std::find(rules_.begin(), rules_.end(), rule) != rules_.end();
}

RuleConfig RuleConfig::without(std::string_view rule) const {
  std::vector<std::string> kept;
  for (const auto& r : rules_) {
    if (r != rule) kept.push_back(r);
  }
  return RuleConfig(std::move(kept), language_);
}

std::string standardize_text(std::string_view text, const RuleConfig& config, RuleHits* hits) {
  std::u32string current = utf8::decode(text);
  for (const auto& rule : config.enabled_rules()) {
    std::u32string next;
    if (rule == kRuleQuotes) {
      next = apply_quotes(current);
    } else if (rule == kRuleEllipsis) {
      next = apply_ellipsis(current);
    } else if (rule == kRuleSpacing) {
      next = apply_spacing(current);
    } else if (rule == kRuleDigits) {
      if (config.language() != TextLanguage::fr) continue;
      next = apply_digits(current);
    } else if (rule == kRuleFinalPeriod) {
      next = apply_final_period(current);
    } else if (rule == kRuleWhitespace) {
      next = apply_whitespace(current);
    } else if (rule == kRuleCapitalize) {
      next = apply_capitalize(current);
    } else {
      continue;
    }
    if (hits != nullptr && next != current) ++(*hits)[rule];
    current = std::move(next);
  }
  return utf8::encode(current);
}

std::string StandardizationReport::to_text() const {
  std::ostringstream out;
  out << "pairs processed: " << pairs_processed << "\n";
  out << "pairs changed:   " << pairs_changed << "\n";
  out << "rule hits:\n";
  for (const auto& rule : registered_rules()) {
    auto it = rule_hits.find(std::string(rule));
    out << "  " << rule << ": " << (it == rule_hits.end() ? 0 : it->second) << "\n";
  }
  for (const auto& d : diffs) {
    out << "\n--- " << d.id << " [" << d.field << "]\n";
    out << "-" << d.before << "\n";
    out << "+" << d.after << "\n";
  }
  return out.str();
}

StandardizedCorpus standardize_corpus(const Corpus& corpus, const RuleConfig& config_src,
                                      const RuleConfig& config_tgt) {
  StandardizationReport report;
  for (const auto& rule : registered_rules()) report.rule_hits[std::string(rule)] = 0;

  const auto word_level = [](const RuleConfig& c) {
    return c.without(kRuleFinalPeriod).without(kRuleCapitalize);
  };
  const RuleConfig src_words = word_level(config_src);
  const RuleConfig tgt_words = word_level(config_tgt);

  std::vector<ParallelPair> out;
  out.reserve(corpus.size());
  for (const auto& pair : corpus.pairs()) {
    const bool words = pair.kind == PairKind::dictionary || pair.kind == PairKind::conjugation;
    ParallelPair next = pair;
    next.src = standardize_text(pair.src, words ? src_words : config_src, &report.rule_hits);
    next.tgt = standardize_text(pair.tgt, words ? tgt_words : config_tgt, &report.rule_hits);
    ++report.pairs_processed;
    if (next.src != pair.src || next.tgt != pair.tgt) {
      ++report.pairs_changed;
      if (next.src != pair.src) {
        report.diffs.push_back({pair.id, corpus.lang_pair().source, pair.src, next.src});
      }
      if (next.tgt != pair.tgt) {
        report.diffs.push_back({pair.id, corpus.lang_pair().target, pair.tgt, next.tgt});
      }
    }
    out.push_back(std::move(next));
  }
  return {Corpus(corpus.lang_pair(), std::move(out)), std::move(report)};
}

}  // namespace lyra
