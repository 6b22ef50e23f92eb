#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "../support/oracles.hpp"
#include "lyra/error.hpp"
#include "lyra/metrics.hpp"

using namespace lyra;

namespace {

std::vector<SegmentPair> one(const std::string& hyp, const std::string& ref) { return {{hyp, ref}}; }

std::string random_sentence(std::mt19937_64& rng, std::size_t min_len) {
  static const std::vector<std::string> vocab = {"u",     "gatu", "gati", "dorme", "dormu",
                                                 "ancura", "ben",  "a",    "casa",  "casetta"};
  std::string out;
  const std::size_t len = min_len + rng() % 9;
  for (std::size_t i = 0; i < len; ++i) {
    if (!out.empty()) out += ' ';
    out += vocab[rng() % vocab.size()];
  }
  return out;
}

}  // namespace

TEST_SUITE("tokenize") {
  TEST_CASE("punctuation splits, inner hyphens stay") {
    CHECK(tokenize("Qu'il vient, «vite»!") ==
          std::vector<std::string>{"Qu", "'", "il", "vient", ",", "«", "vite", "»", "!"});
    CHECK(tokenize("dix-neuf - vingt") == std::vector<std::string>{"dix-neuf", "-", "vingt"});
    CHECK(tokenize("  Été là ") == std::vector<std::string>{"Été", "là"});
    CHECK(tokenize("").empty());
  }

  TEST_CASE("metric names") {
    CHECK(parse_metric_kind("chrf++") == MetricKind::chrf_pp);
    CHECK(parse_metric_kind("METEOR") == MetricKind::meteor);
    CHECK_THROWS(parse_metric_kind("ter"));
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("short hypothesis without four-grams") {
    const auto pairs = one("the cat sat", "the cat sat on the mat");
    CHECK(bleu_corpus(pairs).corpus_value == 0.0);
    CHECK(bleu_sentence(pairs[0]) == doctest::Approx(100.0 * std::exp(-1.0)).epsilon(1e-12));
  }

  TEST_CASE("identity scores") {
    const auto pairs = one("le chat dort ici", "le chat dort ici");
    CHECK(bleu_corpus(pairs).corpus_value == 100.0);
    CHECK(chrf_pp(pairs).corpus_value == 100.0);
    const double m = 4;
    CHECK(meteor(pairs).corpus_value == doctest::Approx(1.0 - 0.5 / (m * m * m)).epsilon(1e-15));
  }

  TEST_CASE("chrF++ on three characters") {
    CHECK(chrf_pp(one("abc", "abd")).corpus_value == doctest::Approx(100.0 * 7.0 / 24.0).epsilon(1e-12));
  }

  TEST_CASE("METEOR prefix match and fragmentation") {
    const std::vector<std::string> ref = {"le", "chats", "dort"};
    const std::vector<std::string> hyp = {"le", "chat", "dort"};
    CHECK(meteor_segment(hyp, ref) == doctest::Approx(1.0 - 1.0 / 54.0).epsilon(1e-14));
    const std::vector<std::string> shuffled = {"dort", "le", "chat"};
    const std::vector<std::string> ref2 = {"le", "chat", "dort"};
    CHECK(meteor_segment(shuffled, ref2) == doctest::Approx(23.0 / 27.0).epsilon(1e-14));
    const std::vector<std::string> none = {"x"};
    CHECK(meteor_segment(none, ref2) == 0.0);
  }

  TEST_CASE("lowercase option") {
    const auto pairs = one("Le Chat", "le chat");
    CHECK(bleu_corpus(pairs).corpus_value < 100.0);
    CHECK(bleu_corpus(pairs, {true}).corpus_value == 100.0);
    CHECK(bleu_corpus(pairs, {true}).params.at("lowercase") == "true");
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(bleu_corpus(std::vector<SegmentPair>{}), ValidationError);
    CHECK_THROWS_AS(chrf_pp(one("a", " ")), ValidationError);
    CHECK_THROWS_AS(meteor(one("a", "")), ValidationError);
    CHECK(bleu_corpus(one("", "un chat")).corpus_value == 0.0);
  }

  TEST_CASE("agrees with the oracle on random corpora") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 200; ++round) {
      std::vector<SegmentPair> pairs;
      std::vector<std::pair<std::string, std::string>> plain;
      const int n = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < n; ++i) {
        auto ref = random_sentence(rng, 1);
        auto hyp = rng() % 4 == 0 ? ref : random_sentence(rng, 0);
        pairs.push_back({hyp, ref});
        plain.emplace_back(hyp, ref);
      }
      CAPTURE(round);
      const auto b = bleu_corpus(pairs);
      CHECK(b.corpus_value == doctest::Approx(oracle::bleu_corpus(plain)).epsilon(1e-9));
      CHECK(chrf_pp(pairs).corpus_value == doctest::Approx(oracle::chrf_corpus(plain)).epsilon(1e-9));
      const auto m = meteor(pairs);
      double mean = 0;
      for (int i = 0; i < n; ++i) {
        const double seg = oracle::meteor(plain[i].first, plain[i].second);
        CHECK(m.per_segment[i] == doctest::Approx(seg).epsilon(1e-9));
        CHECK(b.per_segment[i] ==
              doctest::Approx(oracle::bleu_sentence(oracle::bleu_counts(plain[i].first, plain[i].second)))
                  .epsilon(1e-9));
        mean += seg;
      }
      CHECK(m.corpus_value == doctest::Approx(mean / n).epsilon(1e-9));
    }
  }

  TEST_CASE("scores stay in range") {
    std::mt19937_64 rng(4);
    for (int round = 0; round < 100; ++round) {
      const auto pairs = one(random_sentence(rng, 0), random_sentence(rng, 1));
      for (auto kind : {MetricKind::bleu, MetricKind::chrf_pp, MetricKind::meteor}) {
        const auto s = compute_metric(kind, pairs);
        const double top = kind == MetricKind::meteor ? 1.0 : 100.0;
        CHECK(s.corpus_value >= 0.0);
        CHECK(s.corpus_value <= top);
      }
    }
  }
}
