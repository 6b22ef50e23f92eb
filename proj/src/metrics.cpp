#include "lyra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "lyra/error.hpp"
#include "lyra/utf8.hpp"

namespace lyra {

namespace {

bool hyphen(char32_t cp) { return cp == U'-' || cp == 0x2010 || cp == 0x2011; }
bool wordish(char32_t cp) { return utf8::is_letter(cp) || utf8::is_digit(cp) || utf8::is_combining(cp); }

void check_pairs(std::span<const SegmentPair> pairs, std::string_view metric) {
  if (pairs.empty()) throw ValidationError(std::string(metric) + ": empty segment list");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (utf8::trim(pairs[i].reference).empty()) {
      throw ValidationError(std::string(metric) + ": segment " + std::to_string(i + 1) +
                            " has an empty reference");
    }
  }
}

std::string prepare(std::string_view text, const MetricOptions& options) {
  return options.lowercase ? utf8::lowercase(text) : std::string(text);
}

/// Clipped n-gram matches between two sequences. Window start positions
/// are sorted by content and the two sorted lists merged, so no n-gram is
/// ever copied out.
template <typename Seq>
std::int64_t clipped_matches(const Seq& hyp, const Seq& ref, std::size_t n) {
  if (n == 0 || hyp.size() < n || ref.size() < n) return 0;
  using It = decltype(std::declval<const Seq&>().begin());
  const auto before = [n](It a, It b) { return std::lexicographical_compare(a, a + n, b, b + n); };
  auto windows = [&](const Seq& seq) {
    std::vector<It> out;
    out.reserve(seq.size() - n + 1);
    for (auto it = seq.begin(); it + static_cast<std::ptrdiff_t>(n) <= seq.end(); ++it) out.push_back(it);
    std::sort(out.begin(), out.end(), before);
    return out;
  };
  const auto h = windows(hyp);
  const auto r = windows(ref);
  std::int64_t matches = 0;
  std::size_t i = 0, j = 0;
  while (i < h.size() && j < r.size()) {
    if (before(h[i], r[j])) {
      ++i;
    } else if (before(r[j], h[i])) {
      ++j;
    } else {
      std::size_t hi = i + 1, rj = j + 1;
      while (hi < h.size() && !before(h[i], h[hi])) ++hi;
      while (rj < r.size() && !before(r[j], r[rj])) ++rj;
      matches += static_cast<std::int64_t>(std::min(hi - i, rj - j));
      i = hi;
      j = rj;
    }
  }
  return matches;
}

std::int64_t total(std::size_t len, std::size_t n) {
  return len >= n ? static_cast<std::int64_t>(len - n + 1) : 0;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (utf8::is_space(cp)) {
      flush();
    } else if (utf8::is_punct(cp)) {
      const bool inner_hyphen = hyphen(cp) && i > 0 && i + 1 < cps.size() && wordish(cps[i - 1]) &&
                                wordish(cps[i + 1]) && !current.empty();
      if (inner_hyphen) {
        utf8::append(current, cp);
      } else {
        flush();
        std::string punct;
        utf8::append(punct, cp);
        tokens.push_back(std::move(punct));
      }
    } else {
      utf8::append(current, cp);
    }
  }
  flush();
  return tokens;
}

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::bleu: return "bleu";
    case MetricKind::chrf_pp: return "chrf_pp";
    case MetricKind::meteor: return "meteor";
  }
  return "bleu";
}

MetricKind parse_metric_kind(std::string_view name) {
  const std::string text = utf8::lowercase(name);
  if (text == "bleu") return MetricKind::bleu;
  if (text == "chrf_pp" || text == "chrf++" || text == "chrf") return MetricKind::chrf_pp;
  if (text == "meteor") return MetricKind::meteor;
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

// BLEU -------------------------------------------------------------------------

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += other.matches[n];
    hyp_ngrams[n] += other.hyp_ngrams[n];
    ref_ngrams[n] += other.ref_ngrams[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats bleu_stats(std::span<const std::string> hyp, std::span<const std::string> ref) {
  BleuStats s;
  for (std::size_t n = 1; n <= 4; ++n) {
    s.matches[n - 1] = clipped_matches(hyp, ref, n);
    s.hyp_ngrams[n - 1] = total(hyp.size(), n);
    s.ref_ngrams[n - 1] = total(ref.size(), n);
  }
  s.hyp_len = static_cast<std::int64_t>(hyp.size());
  s.ref_len = static_cast<std::int64_t>(ref.size());
  return s;
}

namespace {

double brevity_penalty(std::int64_t c, std::int64_t r) {
  if (c > r) return 1.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

}  // namespace

double bleu_from_stats(const BleuStats& s) {
  if (s.hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (s.hyp_ngrams[n] == 0 && s.ref_ngrams[n] == 0) continue;
    if (s.matches[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(s.matches[n]) / static_cast<double>(s.hyp_ngrams[n]));
    ++orders;
  }
  return 100.0 * brevity_penalty(s.hyp_len, s.ref_len) * std::exp(log_sum / orders);
}

double bleu_sentence_from_stats(const BleuStats& s) {
  if (s.hyp_len == 0 || s.matches[0] == 0) return 0.0;
  double log_sum = std::log(static_cast<double>(s.matches[0]) / static_cast<double>(s.hyp_ngrams[0]));
  for (std::size_t n = 1; n < 4; ++n) {
    log_sum += std::log(static_cast<double>(s.matches[n] + 1) / static_cast<double>(s.hyp_ngrams[n] + 1));
  }
  return 100.0 * brevity_penalty(s.hyp_len, s.ref_len) * std::exp(log_sum / 4.0);
}

MetricScore bleu_corpus(std::span<const SegmentPair> pairs, const MetricOptions& options) {
  check_pairs(pairs, "bleu");
  MetricScore score;
  score.metric = MetricKind::bleu;
  BleuStats pooled;
  for (const auto& p : pairs) {
    const auto stats = bleu_stats(tokenize(prepare(p.hypothesis, options)),
                                  tokenize(prepare(p.reference, options)));
    pooled += stats;
    score.per_segment.push_back(bleu_sentence_from_stats(stats));
  }
  score.corpus_value = bleu_from_stats(pooled);
  score.params = {{"max_order", "4"},
                  {"smoothing", "none (corpus); add-one on orders 2-4 (per-segment)"},
                  {"empty_orders", "skipped"},
                  {"tokenizer", "punct-split"},
                  {"lowercase", options.lowercase ? "true" : "false"},
                  {"references", "1"}};
  return score;
}

double bleu_sentence(const SegmentPair& pair, const MetricOptions& options) {
  return bleu_sentence_from_stats(bleu_stats(tokenize(prepare(pair.hypothesis, options)),
                                             tokenize(prepare(pair.reference, options))));
}

// chrF++ -----------------------------------------------------------------------

MetricScore chrf_pp(std::span<const SegmentPair> pairs, const MetricOptions& options) {
  check_pairs(pairs, "chrf_pp");
  constexpr int kOrders = kChrfCharOrder + kChrfWordOrder;
  struct OrderStats {
    std::int64_t matches = 0, hyp = 0, ref = 0;
  };

  auto score_orders = [](const std::array<OrderStats, kOrders>& stats) {
    const double b2 = kChrfBeta * kChrfBeta;
    double sum = 0.0;
    int used = 0;
    for (const auto& o : stats) {
      if (o.hyp == 0 && o.ref == 0) continue;
      ++used;
      if (o.matches == 0) continue;
      const double p = static_cast<double>(o.matches) / static_cast<double>(o.hyp);
      const double r = static_cast<double>(o.matches) / static_cast<double>(o.ref);
      sum += (1.0 + b2) * p * r / (b2 * p + r);
    }
    return used == 0 ? 0.0 : 100.0 * sum / used;
  };

  MetricScore score;
  score.metric = MetricKind::chrf_pp;
  std::array<OrderStats, kOrders> pooled{};
  for (const auto& p : pairs) {
    const auto hyp_text = prepare(p.hypothesis, options);
    const auto ref_text = prepare(p.reference, options);
    std::u32string hyp_chars, ref_chars;
    for (char32_t cp : utf8::decode(hyp_text)) {
      if (!utf8::is_space(cp)) hyp_chars.push_back(cp);
    }
    for (char32_t cp : utf8::decode(ref_text)) {
      if (!utf8::is_space(cp)) ref_chars.push_back(cp);
    }
    const auto hyp_words = tokenize(hyp_text);
    const auto ref_words = tokenize(ref_text);

    std::array<OrderStats, kOrders> seg{};
    for (int n = 1; n <= kChrfCharOrder; ++n) {
      auto& o = seg[n - 1];
      o.matches = clipped_matches(hyp_chars, ref_chars, static_cast<std::size_t>(n));
      o.hyp = total(hyp_chars.size(), n);
      o.ref = total(ref_chars.size(), n);
    }
    for (int n = 1; n <= kChrfWordOrder; ++n) {
      auto& o = seg[kChrfCharOrder + n - 1];
      o.matches = clipped_matches(hyp_words, ref_words, static_cast<std::size_t>(n));
      o.hyp = total(hyp_words.size(), n);
      o.ref = total(ref_words.size(), n);
    }
    for (int i = 0; i < kOrders; ++i) {
      pooled[i].matches += seg[i].matches;
      pooled[i].hyp += seg[i].hyp;
      pooled[i].ref += seg[i].ref;
    }
    score.per_segment.push_back(score_orders(seg));
  }
  score.corpus_value = score_orders(pooled);
  score.params = {{"char_order", std::to_string(kChrfCharOrder)},
                  {"word_order", std::to_string(kChrfWordOrder)},
                  {"beta", format_double(kChrfBeta)},
                  {"averaging", "mean of per-order F-beta over orders present"},
                  {"whitespace", "stripped for character n-grams"},
                  {"tokenizer", "punct-split"},
                  {"lowercase", options.lowercase ? "true" : "false"}};
  return score;
}

// METEOR -----------------------------------------------------------------------

namespace {

constexpr std::size_t kStemPrefix = 4;

bool shares_prefix(const std::string& a, const std::string& b) {
  const auto ca = utf8::decode(a);
  const auto cb = utf8::decode(b);
  if (ca.size() < kStemPrefix || cb.size() < kStemPrefix) return false;
  return std::equal(ca.begin(), ca.begin() + kStemPrefix, cb.begin());
}

}  // namespace

double meteor_segment(std::span<const std::string> hyp, std::span<const std::string> ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  std::vector<long> ref_of(hyp.size(), -1);
  std::vector<bool> taken(ref.size(), false);

  auto align = [&](auto&& same) {
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (ref_of[i] >= 0) continue;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!taken[j] && same(hyp[i], ref[j])) {
          taken[j] = true;
          ref_of[i] = static_cast<long>(j);
          break;
        }
      }
    }
  };
  align([](const std::string& a, const std::string& b) { return a == b; });
  align(shares_prefix);

  std::int64_t matches = 0;
  std::int64_t chunks = 0;
  long prev_hyp = -2, prev_ref = -2;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (ref_of[i] < 0) continue;
    ++matches;
    if (!(static_cast<long>(i) == prev_hyp + 1 && ref_of[i] == prev_ref + 1)) ++chunks;
    prev_hyp = static_cast<long>(i);
    prev_ref = ref_of[i];
  }
  if (matches == 0) return 0.0;
  const double p = static_cast<double>(matches) / static_cast<double>(hyp.size());
  const double r = static_cast<double>(matches) / static_cast<double>(ref.size());
  const double fmean = 10.0 * p * r / (r + 9.0 * p);
  const double penalty = 0.5 * static_cast<double>(chunks * chunks * chunks) /
                         static_cast<double>(matches * matches * matches);
  return fmean * (1.0 - penalty);
}

MetricScore meteor(std::span<const SegmentPair> pairs, const MetricOptions& options) {
  check_pairs(pairs, "meteor");
  MetricScore score;
  score.metric = MetricKind::meteor;
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double s = meteor_segment(tokenize(prepare(p.hypothesis, options)),
                                     tokenize(prepare(p.reference, options)));
    score.per_segment.push_back(s);
    sum += s;
  }
  score.corpus_value = sum / static_cast<double>(pairs.size());
  score.params = {{"variant", "meteor-lite"},
                  {"stages", "exact, prefix>=4"},
                  {"alignment", "greedy leftmost"},
                  {"alpha", "0.9"},
                  {"penalty", "0.5*(chunks/matches)^3"},
                  {"aggregate", "mean of segment scores"},
                  {"tokenizer", "punct-split"},
                  {"lowercase", options.lowercase ? "true" : "false"}};
  return score;
}

MetricScore compute_metric(MetricKind kind, std::span<const SegmentPair> pairs,
                           const MetricOptions& options) {
  switch (kind) {
    case MetricKind::bleu: return bleu_corpus(pairs, options);
    case MetricKind::chrf_pp: return chrf_pp(pairs, options);
    case MetricKind::meteor: return meteor(pairs, options);
  }
  throw Error(ErrorCategory::internal, "unhandled metric kind");
}

}  // namespace lyra
