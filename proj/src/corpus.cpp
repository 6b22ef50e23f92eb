#include "lyra/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "lyra/error.hpp"
#include "lyra/io.hpp"
#include "lyra/utf8.hpp"

namespace lyra {

namespace {

using ordered_json = nlohmann::ordered_json;

bool blank(std::string_view line) { return utf8::trim(line).empty(); }

}  // namespace

std::string_view to_string(PairKind kind) noexcept {
  switch (kind) {
    case PairKind::sentence: return "sentence";
    case PairKind::dictionary: return "dictionary";
    case PairKind::conjugation: return "conjugation";
    case PairKind::proverb: return "proverb";
  }
  return "sentence";
}

std::optional<PairKind> parse_pair_kind(std::string_view text) noexcept {
  if (text == "sentence") return PairKind::sentence;
  if (text == "dictionary") return PairKind::dictionary;
  if (text == "conjugation") return PairKind::conjugation;
  if (text == "proverb") return PairKind::proverb;
  return std::nullopt;
}

bool is_valid_lang_code(std::string_view code) noexcept {
  if (code.size() < 2 || code.size() > 3) return false;
  return std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

Corpus::Corpus(LangPair lang_pair, std::vector<ParallelPair> pairs)
    : lang_pair_(std::move(lang_pair)), pairs_(std::move(pairs)) {
  if (!is_valid_lang_code(lang_pair_.source) || !is_valid_lang_code(lang_pair_.target)) {
    throw ValidationError("invalid language pair (" + lang_pair_.source + ", " +
                          lang_pair_.target + ")");
  }
  if (lang_pair_.source == lang_pair_.target) {
    throw ValidationError("language pair uses '" + lang_pair_.source + "' on both sides");
  }
  index_.reserve(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& p = pairs_[i];
    if (p.id.empty()) {
      throw ValidationError("record " + std::to_string(i + 1) + " has an empty id");
    }
    if (utf8::trim(p.src).empty() || utf8::trim(p.tgt).empty()) {
      throw ValidationError("pair '" + p.id + "' has empty text");
    }
    auto [it, inserted] = index_.emplace(p.id, i);
    if (!inserted) {
      throw ValidationError("duplicate id '" + p.id + "' at records " +
                            std::to_string(it->second + 1) + " and " + std::to_string(i + 1));
    }
  }
}

const ParallelPair* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &pairs_[it->second];
}

const std::string& Corpus::text(const ParallelPair& pair, std::string_view lang) const {
  if (lang == lang_pair_.source) return pair.src;
  if (lang == lang_pair_.target) return pair.tgt;
  throw ValidationError("corpus (" + lang_pair_.source + ", " + lang_pair_.target +
                        ") has no '" + std::string(lang) + "' side");
}

Corpus parse_corpus(std::string_view content, const LangPair& lang_pair, std::string_view origin) {
  const std::string where(origin);
  std::vector<ParallelPair> pairs;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(content)) {
    ++line_no;
    if (blank(line)) continue;
    const std::string at = where + ":" + std::to_string(line_no);
    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(at + ": malformed record: " + e.what());
    }
    if (!record.is_object()) throw ParseError(at + ": record is not an object");

    auto field = [&](const std::string& key) -> std::string {
      auto it = record.find(key);
      if (it == record.end()) throw ParseError(at + ": missing field '" + key + "'");
      if (!it->is_string()) throw ParseError(at + ": field '" + key + "' is not a string");
      return it->get<std::string>();
    };

    ParallelPair pair;
    pair.id = field("id");
    pair.src = field(lang_pair.source);
    pair.tgt = field(lang_pair.target);
    const std::string kind = field("kind");
    pair.provenance = field("source");
    auto parsed = parse_pair_kind(kind);
    if (!parsed) throw ParseError(at + ": unknown kind '" + kind + "'");
    pair.kind = *parsed;

    if (pair.id.empty()) throw ValidationError(at + ": empty id");
    if (utf8::trim(pair.src).empty() || utf8::trim(pair.tgt).empty()) {
      throw ValidationError(at + ": pair '" + pair.id + "' has empty text");
    }
    auto [it, inserted] = first_line.emplace(pair.id, line_no);
    if (!inserted) {
      throw ValidationError(where + ": duplicate id '" + pair.id + "' at lines " +
                            std::to_string(it->second) + " and " + std::to_string(line_no));
    }
    pairs.push_back(std::move(pair));
  }
  return Corpus(lang_pair, std::move(pairs));
}

Corpus load_corpus(const std::filesystem::path& path, const LangPair& lang_pair) {
  return parse_corpus(read_file(path), lang_pair, path.string());
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  const auto& lp = corpus.lang_pair();
  for (const auto& p : corpus.pairs()) {
    ordered_json record;
    record["id"] = p.id;
    record[lp.source] = p.src;
    record[lp.target] = p.tgt;
    record["kind"] = std::string(to_string(p.kind));
    record["source"] = p.provenance;
    try {
      out += record.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
    } catch (const nlohmann::json::exception&) {
      throw ValidationError("pair '" + p.id + "' contains invalid UTF-8");
    }
    out += '\n';
  }
  return out;
}

void export_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, serialize_corpus(corpus));
}

Corpus parse_opus_books(std::string_view content, std::string_view origin) {
  const std::string where(origin);
  std::vector<ParallelPair> pairs;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(content)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const std::string at = where + ": record " + std::to_string(line_no);
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(at + ": expected exactly two tab-separated columns");
    }
    std::string fr(utf8::trim(line.substr(0, tab)));
    std::string it(utf8::trim(line.substr(tab + 1)));
    if (fr.empty()) throw ParseError(at + ": empty French side");
    if (it.empty()) throw ParseError(at + ": empty Italian side");
    char id[32];
    std::snprintf(id, sizeof id, "opus-%06zu", pairs.size() + 1);
    pairs.push_back({id, std::move(fr), std::move(it), PairKind::sentence, "opus-books"});
  }
  return Corpus({"fr", "it"}, std::move(pairs));
}

Corpus ingest_opus_books(const std::filesystem::path& path) {
  return parse_opus_books(read_file(path), path.string());
}

CountReport validate_counts(const Corpus& corpus, const CountTable& expected) {
  CountTable actual;
  for (const auto& p : corpus.pairs()) {
    ++actual[std::string(to_string(p.kind))];
    if (p.kind != PairKind::sentence) ++actual["other"];
  }
  actual["total"] = static_cast<std::int64_t>(corpus.size());

  CountReport report;
  for (const auto& [key, want] : expected) {
    CountCheck check{key, want, actual.contains(key) ? actual.at(key) : 0};
    report.pass = report.pass && check.pass();
    report.checks.push_back(std::move(check));
  }
  return report;
}

CountTable published_counts() { return {{"sentence", 10794}, {"other", 42698}}; }

SplitSpec SplitSpec::explicit_set(std::vector<std::string> ids) {
  SplitSpec spec;
  spec.mode = SplitMode::explicit_ids;
  spec.test_ids = std::move(ids);
  return spec;
}

SplitSpec SplitSpec::random(std::uint64_t seed, double fraction) {
  SplitSpec spec;
  spec.mode = SplitMode::seeded_random;
  spec.seed = seed;
  spec.test_fraction = fraction;
  return spec;
}

TrainTestSplit split_train_test(const Corpus& corpus, const SplitSpec& spec) {
  std::unordered_set<std::string> test_ids;
  if (spec.mode == SplitMode::explicit_ids) {
    if (!spec.test_ids) throw ValidationError("explicit_ids split requires test_ids");
    for (const auto& id : *spec.test_ids) {
      if (!corpus.contains(id)) throw ValidationError("unknown test id '" + id + "'");
      test_ids.insert(id);
    }
  } else {
    if (!spec.seed || !spec.test_fraction) {
      throw ValidationError("seeded_random split requires seed and test_fraction");
    }
    const double fraction = *spec.test_fraction;
    if (!(fraction > 0.0 && fraction < 1.0)) {
      throw ValidationError("test_fraction must lie in (0, 1)");
    }
    std::vector<std::string> ids;
    ids.reserve(corpus.size());
    for (const auto& p : corpus.pairs()) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    std::mt19937_64 gen(*spec.seed);
    for (std::size_t i = ids.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(gen() % i);
      std::swap(ids[i - 1], ids[j]);
    }
    const auto n_test = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(ids.size())));
    test_ids.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  }

  std::vector<ParallelPair> train, test;
  for (const auto& p : corpus.pairs()) {
    (test_ids.contains(p.id) ? test : train).push_back(p);
  }
  return {Corpus(corpus.lang_pair(), std::move(train)), Corpus(corpus.lang_pair(), std::move(test))};
}

}  // namespace lyra
