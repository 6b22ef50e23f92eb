#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "../support/fake_transport.hpp"
#include "../support/oracles.hpp"
#include "lyra/embedding.hpp"
#include "lyra/error.hpp"
#include "lyra/retrieval.hpp"

using namespace lyra;

namespace {

std::string le32(std::uint32_t v) {
  std::string out(4, '\0');
  for (int i = 0; i < 4; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  return out;
}

std::string le64(std::uint64_t v) {
  std::string out(8, '\0');
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  return out;
}

std::string f32(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  return le32(bits);
}

std::vector<EmbeddingVector> random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_int_distribution<int> coord(-3, 3);
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    EmbeddingVector v{"id" + std::to_string(1000 + i), {}};
    do {
      v.values.assign(dim, 0.0f);
      for (auto& x : v.values) x = static_cast<float>(coord(rng));
    } while (std::all_of(v.values.begin(), v.values.end(), [](float x) { return x == 0.0f; }));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST_SUITE("retrieval") {
  TEST_CASE("cosine similarity") {
    const std::vector<double> a = {1, 0}, b = {1, 1}, c = {-2, 0};
    CHECK(cosine_similarity(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(cosine_similarity(a, c) == -1.0);
    const std::vector<double> z = {0, 0}, d3 = {1, 2, 3};
    CHECK_THROWS_AS(cosine_similarity(a, z), ValidationError);
    CHECK_THROWS_AS(cosine_similarity(a, d3), ValidationError);
  }

  TEST_CASE("build rejects bad input naming the pair") {
    std::vector<EmbeddingVector> v = {{"a", {1, 0}}, {"b", {1, 0, 0}}};
    CHECK_THROWS_WITH_AS(EmbeddingIndex::build(v), doctest::Contains("'b'"), ValidationError);
    v = {{"a", {1, 0}}, {"a", {0, 1}}};
    CHECK_THROWS_AS(EmbeddingIndex::build(v), ValidationError);
    v = {{"a", {0, 0}}};
    CHECK_THROWS_AS(EmbeddingIndex::build(v), ValidationError);
  }

  TEST_CASE("top-k matches brute force, ties broken by id") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 50; ++round) {
      auto vectors = random_vectors(rng, 1 + rng() % 30, 1 + rng() % 4);
      const auto index = EmbeddingIndex::build(vectors);
      std::vector<float> q = random_vectors(rng, 1, index.dim())[0].values;
      const std::size_t k = 1 + rng() % 35;
      const auto got = query_knn(index, q, k);
      const auto want = oracle::knn(index, q, k);
      REQUIRE(got.size() == want.size());
      CHECK(got.size() == std::min(k, index.size()));
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].pair_id == want[i].pair_id);
        CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("query errors") {
    std::vector<EmbeddingVector> v = {{"a", {1, 0}}};
    const auto index = EmbeddingIndex::build(v);
    const std::vector<float> ok = {1, 1}, zero = {0, 0}, wide = {1, 1, 1};
    CHECK_THROWS_AS(query_knn(index, ok, 0), ValidationError);
    CHECK_THROWS_AS(query_knn(index, zero, 1), ValidationError);
    CHECK_THROWS_AS(query_knn(index, wide, 1), ValidationError);
  }

  TEST_CASE("serialized layout") {
    std::vector<EmbeddingVector> v = {{"a", {3, 4}}};
    const auto index = EmbeddingIndex::build(v, {"m", "t"});
    const std::string want = "LYRAEIDX" + le32(1) + le32(2) + le64(1) + le32(1) + "m" + le32(1) + "t" +
                             le32(1) + "a" + f32(0.6f) + f32(0.8f);
    CHECK(serialize_index(index) == want);
  }

  TEST_CASE("save and load round trip") {
    std::mt19937_64 rng(9);
    const auto index = EmbeddingIndex::build(random_vectors(rng, 17, 6), {"model-x", "2024-01-01"});
    const auto path = std::filesystem::temp_directory_path() / "lyra_unit_index.lyra";
    save_index(index, path);
    CHECK(load_index(path) == index);
    std::filesystem::remove(path);
  }

  TEST_CASE("corrupt files are parse errors") {
    std::vector<EmbeddingVector> v = {{"a", {3, 4}}};
    const std::string bytes = serialize_index(EmbeddingIndex::build(v));
    CHECK_THROWS_AS(deserialize_index("NOTANIDX" + bytes.substr(8)), ParseError);
    CHECK_THROWS_AS(deserialize_index(bytes.substr(0, bytes.size() - 1)), ParseError);
    CHECK_THROWS_AS(deserialize_index(bytes + "x"), ParseError);
    std::string bad_version = bytes;
    bad_version[8] = 2;
    CHECK_THROWS_AS(deserialize_index(bad_version), ParseError);
    CHECK(deserialize_index(serialize_index(EmbeddingIndex{})).empty());
  }
}

TEST_SUITE("embedding") {
  TEST_CASE("fallback embedding is deterministic and unit norm") {
    const auto a = fallback_embed("Le chat dort.", 64);
    CHECK(a.values == fallback_embed("Le chat dort.", 64).values);
    double norm = 0;
    for (float x : a.values) norm += double(x) * x;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
    const auto b = fallback_embed("Le chat dort bien.", 64);
    const auto c = fallback_embed("Quelle heure est-il ?", 64);
    CHECK(cosine_similarity(a.values, b.values) > cosine_similarity(a.values, c.values));
    CHECK(fallback_embed("", 8).dim() == 8);
    CHECK_THROWS_AS(fallback_embed("x", 7), ValidationError);
  }

  TEST_CASE("response parsing") {
    const auto data = parse_embedding_response(
        R"({"data": [{"index": 1, "embedding": [3, 4]}, {"index": 0, "embedding": [1, 0]}]})", 2);
    REQUIRE(data.size() == 2);
    CHECK(data[0] == std::vector<float>{1, 0});
    CHECK(data[1] == std::vector<float>{3, 4});
    CHECK(parse_embedding_response("[[1, 2]]", 1)[0] == std::vector<float>{1, 2});
    CHECK_THROWS_AS(parse_embedding_response("[[1, 2]]", 2), ProtocolError);
    CHECK_THROWS_AS(parse_embedding_response(R"({"data": 3})", 1), ProtocolError);
    CHECK_THROWS_AS(parse_embedding_response("not json", 1), ProtocolError);
  }

  TEST_CASE("http embedder batches, authenticates and retries 5xx") {
    auto transport = std::make_shared<fake::Transport>([](const fake::Request& r, int call) {
      if (call == 1) return HttpResponse{503, "busy"};
      const auto body = nlohmann::json::parse(r.body);
      nlohmann::json out = nlohmann::json::array();
      for (const auto& text : body.at("input")) {
        out.push_back({static_cast<double>(text.get<std::string>().size()), 1.0});
      }
      return HttpResponse{200, out.dump()};
    });
    std::vector<std::chrono::milliseconds> sleeps;
    HttpEmbedderConfig config;
    config.endpoint = "http://localhost:1/v1/embeddings";
    config.auth_token = "s3cret";
    config.batch_size = 2;
    config.max_inflight = 1;
    HttpEmbedder embedder(config, transport, [&](auto d) { sleeps.push_back(d); });
    const std::vector<std::string> texts = {"a", "bb", "ccc", "dddd", "eeeee"};
    const auto out = embedder.embed(texts);
    REQUIRE(out.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(out[i][0] == float(i + 1));
    const auto requests = transport->requests();
    CHECK(requests.size() == 4);
    CHECK(requests[0].header("Authorization") == "Bearer s3cret");
    CHECK(nlohmann::json::parse(requests[0].body).at("model") == kDefaultEmbeddingModel);
    REQUIRE(sleeps.size() == 1);
    CHECK(sleeps[0] == std::chrono::milliseconds(500));
  }

  TEST_CASE("client errors are not retried") {
    auto transport = std::make_shared<fake::Transport>(
        [](const fake::Request&, int) { return HttpResponse{400, "bad input"}; });
    HttpEmbedderConfig config;
    config.endpoint = "http://localhost:1/v1/embeddings";
    HttpEmbedder embedder(config, transport, [](auto) {});
    const std::vector<std::string> texts = {"a"};
    CHECK_THROWS_AS(embedder.embed(texts), ServiceError);
    CHECK(transport->requests().size() == 1);
  }

  TEST_CASE("embed_batch normalizes and checks dimensions") {
    class Ragged final : public Embedder {
     public:
      std::size_t dim() const override { return 0; }
      std::string model_id() const override { return "ragged"; }
      std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
        std::vector<std::vector<float>> out;
        for (const auto& t : texts) out.push_back(std::vector<float>(t.size(), 1.0f));
        return out;
      }
    } ragged;
    const std::vector<std::string> same = {"ab", "cd"}, mixed = {"ab", "cde"};
    const std::vector<std::string> ids = {"x", "y"};
    const auto out = embed_batch(same, ragged, ids);
    CHECK(out[1].pair_id == "y");
    CHECK(out[0].values[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(embed_batch(mixed, ragged), ProtocolError);
    FallbackEmbedder fallback(16);
    CHECK(embed_batch(same, fallback)[0].pair_id == "0");
  }
}
