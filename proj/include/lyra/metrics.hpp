#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lyra {

/// Splits on whitespace and emits every punctuation character as its own
/// token. A hyphen with a letter or digit on both sides stays inside the
/// word ("dix-neuf"). Case and diacritics are preserved.
std::vector<std::string> tokenize(std::string_view text);

struct SegmentPair {
  std::string hypothesis;
  std::string reference;
};

enum class MetricKind { bleu, chrf_pp, meteor };

std::string_view to_string(MetricKind kind) noexcept;
/// Accepts "bleu", "chrf_pp" / "chrf++" / "chrf", "meteor", in any case.
MetricKind parse_metric_kind(std::string_view text);

struct MetricOptions {
  /// Lowercase hypothesis and reference before scoring.
  bool lowercase = false;
};

struct MetricScore {
  MetricKind metric = MetricKind::bleu;
  /// BLEU and chrF++ in [0, 100], METEOR in [0, 1].
  double corpus_value = 0.0;
  std::vector<double> per_segment;
  /// Every setting needed to reproduce the number.
  std::map<std::string, std::string> params;
};

/// Clipped n-gram statistics of one segment for orders 1..4.
struct BleuStats {
  std::array<std::int64_t, 4> matches{};
  std::array<std::int64_t, 4> hyp_ngrams{};
  std::array<std::int64_t, 4> ref_ngrams{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(std::span<const std::string> hyp, std::span<const std::string> ref);

/// Unsmoothed BLEU from pooled statistics, in [0, 100].
///
/// Orders for which neither side has a single n-gram are left out of the
/// geometric mean; any other order with zero matches yields 0. Brevity
/// penalty exp(1 - r/c) when c <= r, 1 otherwise; 0 when c == 0.
double bleu_from_stats(const BleuStats& stats);

/// Sentence BLEU: add-one smoothing on the order 2..4 precisions.
double bleu_sentence_from_stats(const BleuStats& stats);

/// Corpus BLEU over pooled counts. per_segment holds sentence BLEU.
/// Throws ValidationError on an empty list or an empty reference.
MetricScore bleu_corpus(std::span<const SegmentPair> pairs, const MetricOptions& options = {});
double bleu_sentence(const SegmentPair& pair, const MetricOptions& options = {});

/// chrF++ settings.
inline constexpr int kChrfCharOrder = 6;
inline constexpr int kChrfWordOrder = 2;
inline constexpr double kChrfBeta = 2.0;

/// Character n-grams 1..6 on whitespace-free text plus word n-grams 1..2
/// on tokens, counts pooled over the corpus, F-beta per order (beta = 2),
/// arithmetic mean over the orders, x100. Orders with no n-gram on either
/// side are left out of the mean.
MetricScore chrf_pp(std::span<const SegmentPair> pairs, const MetricOptions& options = {});

/// METEOR without stemmer or synonyms. Unigrams are aligned greedily, each
/// hypothesis token (left to right) taking the leftmost free reference
/// token: first by exact match, then by a shared prefix of at least 4
/// characters. Fmean = 10PR / (R + 9P), penalty = 0.5 (chunks/matches)^3,
/// segment = Fmean (1 - penalty), corpus = mean over segments.
MetricScore meteor(std::span<const SegmentPair> pairs, const MetricOptions& options = {});
double meteor_segment(std::span<const std::string> hyp, std::span<const std::string> ref);

MetricScore compute_metric(MetricKind kind, std::span<const SegmentPair> pairs,
                           const MetricOptions& options = {});

}  // namespace lyra
