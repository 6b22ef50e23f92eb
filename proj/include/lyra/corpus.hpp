#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lyra {

enum class PairKind { sentence, dictionary, conjugation, proverb };

std::string_view to_string(PairKind kind) noexcept;
std::optional<PairKind> parse_pair_kind(std::string_view text) noexcept;

/// Source and target language codes of a corpus, e.g. {"fr", "mo"}.
struct LangPair {
  std::string source;
  std::string target;

  friend bool operator==(const LangPair&, const LangPair&) = default;
};

/// Lowercase ASCII, two or three letters.
bool is_valid_lang_code(std::string_view code) noexcept;

/// One aligned unit. `src` is in the corpus' source language (French for
/// both corpora this toolkit handles), `tgt` in its target language.
struct ParallelPair {
  std::string id;
  std::string src;
  std::string tgt;
  PairKind kind = PairKind::sentence;
  std::string provenance;

  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

/// Ordered, validated collection of pairs. Immutable once constructed.
class Corpus {
 public:
  Corpus() = default;
  /// Throws ValidationError on an empty text field, a duplicate id or a
  /// malformed language code.
  Corpus(LangPair lang_pair, std::vector<ParallelPair> pairs);

  const LangPair& lang_pair() const noexcept { return lang_pair_; }
  std::span<const ParallelPair> pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const ParallelPair& operator[](std::size_t i) const { return pairs_[i]; }

  const ParallelPair* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  /// Text of `pair` in language `lang`; throws ValidationError when `lang`
  /// is neither side of this corpus.
  const std::string& text(const ParallelPair& pair, std::string_view lang) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.lang_pair_ == b.lang_pair_ && a.pairs_ == b.pairs_;
  }

 private:
  LangPair lang_pair_{"fr", "mo"};
  std::vector<ParallelPair> pairs_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads the line-delimited JSON corpus format. Each record carries `id`,
/// one key per language code of `lang_pair`, `kind` and `source`.
Corpus load_corpus(const std::filesystem::path& path, const LangPair& lang_pair);

/// Parses the same format from memory. `origin` names the input in errors.
Corpus parse_corpus(std::string_view content, const LangPair& lang_pair,
                    std::string_view origin = "<memory>");

void export_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);

/// Tab-separated French/Italian lines. Ids are synthesized as opus-000001...
Corpus ingest_opus_books(const std::filesystem::path& path);
Corpus parse_opus_books(std::string_view content, std::string_view origin = "<memory>");

// Count validation --------------------------------------------------------

/// Keys are kind names plus "other" (every non-sentence kind combined) and
/// "total".
using CountTable = std::map<std::string, std::int64_t>;

struct CountCheck {
  std::string key;
  std::int64_t expected = 0;
  std::int64_t actual = 0;
  std::int64_t delta() const noexcept { return actual - expected; }
  bool pass() const noexcept { return actual == expected; }
};

struct CountReport {
  std::vector<CountCheck> checks;
  bool pass = true;
};

CountReport validate_counts(const Corpus& corpus, const CountTable& expected);

/// Published sizes of the French-Monégasque dataset.
CountTable published_counts();

// Splitting ---------------------------------------------------------------

enum class SplitMode { explicit_ids, seeded_random };

struct SplitSpec {
  SplitMode mode = SplitMode::explicit_ids;
  std::optional<std::vector<std::string>> test_ids;
  std::optional<std::uint64_t> seed;
  std::optional<double> test_fraction;

  static SplitSpec explicit_set(std::vector<std::string> ids);
  static SplitSpec random(std::uint64_t seed, double fraction);
};

struct TrainTestSplit {
  Corpus train;
  Corpus test;
};

/// Partitions `corpus`; both halves keep corpus order.
///
/// seeded_random sorts the ids, shuffles them with a Fisher-Yates pass driven
/// by std::mt19937_64(seed) (index j = draw % (i + 1)), and sends the first
/// llround(fraction * n) ids to the test side. The result depends only on the
/// id set, the seed and the fraction.
TrainTestSplit split_train_test(const Corpus& corpus, const SplitSpec& spec);

}  // namespace lyra
