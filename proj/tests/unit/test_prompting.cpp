#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "lyra/corpus.hpp"
#include "lyra/error.hpp"
#include "lyra/prompting.hpp"

using namespace lyra;

namespace {

Corpus small_corpus() {
  return Corpus({"fr", "mo"}, {
                                  {"a", "Le chat dort.", "U gatu dorme.", PairKind::sentence, "t"},
                                  {"b", "Il pleut.", "Ciöve.", PairKind::sentence, "t"},
                                  {"c", "Bonjour.", "Bongiurnu.", PairKind::sentence, "t"},
                              });
}

}  // namespace

TEST_SUITE("prompting") {
  TEST_CASE("direction parsing") {
    CHECK(Direction::parse("fr-mo") == Direction{"fr", "mo"});
    CHECK(Direction::parse("mo->fr") == Direction{"mo", "fr"});
    CHECK(Direction::parse("fr→it") == Direction{"fr", "it"});
    CHECK_THROWS_AS(Direction::parse("fr-fr"), ValidationError);
    CHECK_THROWS_AS(Direction::parse("fr-de"), ValidationError);
    CHECK(language_name("mo") == "Monégasque");
  }

  TEST_CASE("plain rendering") {
    const std::vector<RetrievalHit> hits = {{"b", 0.5}, {"a", 0.9}};
    const auto prompt = build_translation_prompt("Il fait beau.", {"fr", "mo"}, hits, small_corpus());
    CHECK(render(prompt) ==
          "Translate from French to Monégasque.\n\n"
          "French: Le chat dort.\nMonégasque: U gatu dorme.\n\n"
          "French: Il pleut.\nMonégasque: Ciöve.\n\n"
          "French: Il fait beau.\nMonégasque:");
  }

  TEST_CASE("zero-shot rendering") {
    const auto prompt = build_translation_prompt("U gatu.", {"mo", "fr"}, {}, small_corpus());
    CHECK(render(prompt) == "Translate from Monégasque to French.\n\nMonégasque: U gatu.\nFrench:");
  }

  TEST_CASE("examples follow the direction") {
    const std::vector<RetrievalHit> hits = {{"c", 0.7}};
    const auto prompt = build_translation_prompt("Ciöve.", {"mo", "fr"}, hits, small_corpus());
    REQUIRE(prompt.examples.size() == 1);
    CHECK(prompt.examples[0].source == "Bongiurnu.");
    CHECK(prompt.examples[0].target == "Bonjour.");
  }

  TEST_CASE("order, truncation and self-exclusion") {
    const std::vector<RetrievalHit> hits = {{"c", 0.5}, {"a", 0.5}, {"b", 0.8}};
    const auto prompt =
        build_translation_prompt("q", {"fr", "mo"}, hits, small_corpus(), "plain", 2, std::string_view("b"));
    REQUIRE(prompt.examples.size() == 2);
    CHECK(prompt.examples[0].pair_id == "a");
    CHECK(prompt.examples[1].pair_id == "c");
    const auto one = build_translation_prompt("q", {"fr", "mo"}, hits, small_corpus(), "plain", 1);
    REQUIRE(one.examples.size() == 1);
    CHECK(one.examples[0].pair_id == "b");
  }

  TEST_CASE("unknown hit ids and unservable directions") {
    const std::vector<RetrievalHit> hits = {{"zz", 0.5}};
    CHECK_THROWS_AS(build_translation_prompt("q", {"fr", "mo"}, hits, small_corpus()), ValidationError);
    const std::vector<RetrievalHit> good = {{"a", 0.5}};
    CHECK_THROWS_AS(build_translation_prompt("q", {"fr", "it"}, good, small_corpus()), ValidationError);
  }

  TEST_CASE("chat messages split instruction from content") {
    const std::vector<RetrievalHit> hits = {{"b", 0.5}};
    const auto prompt = build_translation_prompt("Bonjour.", {"fr", "mo"}, hits, small_corpus(), "chat");
    const auto messages = render_messages(prompt);
    REQUIRE(messages.size() == 2);
    CHECK(messages[0] == ChatMessage{"system", "Translate from French to Monégasque."});
    CHECK(messages[1].role == "user");
    CHECK(messages[1].content == "French: Il pleut.\nMonégasque: Ciöve.\n\nFrench: Bonjour.\nMonégasque:");
    const auto plain = build_translation_prompt("Bonjour.", {"fr", "mo"}, hits, small_corpus());
    REQUIRE(render_messages(plain).size() == 1);
    CHECK(render_messages(plain)[0].content == render(plain));
  }

  TEST_CASE("escaping keeps each field on one line and round trips") {
    CHECK(escape_field("a\nb\\c\r") == "a\\nb\\\\c\\r");
    std::mt19937_64 rng(3);
    const std::string alphabet = "ab\\\nr\rné";
    for (int i = 0; i < 500; ++i) {
      std::string s;
      for (int j = static_cast<int>(rng() % 10); j > 0; --j) s += alphabet[rng() % alphabet.size()];
      const auto e = escape_field(s);
      CHECK(e.find('\n') == std::string::npos);
      CHECK(unescape_field(e) == s);
    }
  }

  TEST_CASE("query extraction inverts rendering") {
    const auto registry = TemplateRegistry::builtin();
    const std::string query = "Deux\nlignes \\ ici";
    const auto prompt = build_translation_prompt(query, {"fr", "mo"}, {}, small_corpus());
    CHECK(extract_query(render(prompt), registry.get("plain"), {"fr", "mo"}) == query);
    CHECK_FALSE(extract_query("no slot here", registry.get("plain"), {"fr", "mo"}).has_value());
  }

  TEST_CASE("template validation") {
    PromptTemplate t;
    t.id = "broken";
    t.query = "{source_lang}: {source}";
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = PromptTemplate{};
    t.id = "no-target";
    t.example = "{source}";
    CHECK_THROWS_AS(t.validate(), ConfigError);
    auto registry = TemplateRegistry::builtin();
    CHECK_THROWS_AS(registry.get("missing"), ConfigError);
    PromptTemplate custom;
    custom.id = "terse";
    custom.instruction = "{source_lang} to {target_lang}";
    custom.separator = "\n";
    registry.add(custom);
    const auto prompt = build_translation_prompt("x", {"fr", "mo"}, {}, small_corpus(), "terse");
    CHECK(render(prompt, registry) == "French to Monégasque\nFrench: x\nMonégasque:");
  }
}
