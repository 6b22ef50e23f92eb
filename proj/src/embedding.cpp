#include "lyra/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "lyra/error.hpp"
#include "lyra/logging.hpp"

#include <spdlog/spdlog.h>
#include "lyra/utf8.hpp"

namespace lyra {

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void normalize(std::vector<float>& v, const std::string& label) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw ProtocolError("embedding for '" + label + "' is a zero or non-finite vector");
  }
  for (auto& x : v) x = static_cast<float>(x / norm);
}

}  // namespace

EmbeddingVector fallback_embed(std::string_view text, std::size_t dim) {
  if (dim < 8) throw ValidationError("fallback embedding dimension must be >= 8");
  std::u32string framed = U"\u0002";
  framed += utf8::decode(text);
  framed += U"\u0003";
  std::vector<double> counts(dim, 0.0);
  for (std::size_t i = 0; i + 3 <= framed.size(); ++i) {
    const std::string gram = utf8::encode(std::u32string_view(framed).substr(i, 3));
    counts[fnv1a(gram) % dim] += 1.0;
  }
  if (framed.size() < 3) counts[fnv1a(utf8::encode(framed)) % dim] += 1.0;

  double norm = 0.0;
  for (double c : counts) norm += c * c;
  norm = std::sqrt(norm);
  EmbeddingVector out;
  out.values.reserve(dim);
  for (double c : counts) out.values.push_back(static_cast<float>(c / norm));
  return out;
}

FallbackEmbedder::FallbackEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ < 8) throw ValidationError("fallback embedding dimension must be >= 8");
}

std::string FallbackEmbedder::model_id() const {
  return "fallback-trigram-" + std::to_string(dim_);
}

std::vector<std::vector<float>> FallbackEmbedder::embed(std::span<const std::string> texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(fallback_embed(t, dim_).values);
  return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config, std::shared_ptr<HttpTransport> transport,
                           Sleeper sleep)
    : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
  if (config_.endpoint.empty()) throw ConfigError("embedding endpoint is not set");
  parse_url(config_.endpoint);
  if (config_.batch_size == 0) throw ConfigError("embedding batch_size must be positive");
  if (config_.max_inflight < 1) throw ConfigError("embedding max_inflight must be positive");
}

std::vector<std::vector<float>> parse_embedding_response(const std::string& body,
                                                         std::size_t expected_count) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("embedding response is not JSON: ") + e.what());
  }

  auto read_vector = [](const nlohmann::json& arr) {
    if (!arr.is_array()) throw ProtocolError("embedding is not an array");
    std::vector<float> v;
    v.reserve(arr.size());
    for (const auto& x : arr) {
      if (!x.is_number()) throw ProtocolError("embedding contains a non-number");
      v.push_back(x.get<float>());
    }
    return v;
  };

  std::vector<std::vector<float>> out;
  if (doc.is_object() && doc.contains("data") && doc["data"].is_array()) {
    const auto& data = doc["data"];
    out.resize(data.size());
    std::vector<bool> filled(data.size(), false);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& item = data[i];
      if (!item.is_object() || !item.contains("embedding")) {
        throw ProtocolError("embedding response item " + std::to_string(i) + " has no embedding");
      }
      std::size_t slot = i;
      if (item.contains("index")) {
        if (!item["index"].is_number_unsigned() || item["index"].get<std::size_t>() >= data.size()) {
          throw ProtocolError("embedding response item " + std::to_string(i) + " has a bad index");
        }
        slot = item["index"].get<std::size_t>();
      }
      if (filled[slot]) throw ProtocolError("embedding response repeats index " + std::to_string(slot));
      filled[slot] = true;
      out[slot] = read_vector(item["embedding"]);
    }
  } else if (doc.is_array()) {
    for (const auto& item : doc) out.push_back(read_vector(item));
  } else {
    throw ProtocolError("unrecognized embedding response shape");
  }
  if (out.size() != expected_count) {
    throw ProtocolError("embedding service returned " + std::to_string(out.size()) +
                        " vectors for " + std::to_string(expected_count) + " inputs");
  }
  return out;
}

std::vector<std::vector<float>> HttpEmbedder::embed_chunk(std::span<const std::string> texts) {
  nlohmann::json request = {{"model", config_.model},
                            {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const std::string body = request.dump();
  HttpHeaders headers;
  if (!config_.auth_token.empty()) headers.emplace_back("Authorization", "Bearer " + config_.auth_token);
  spdlog::debug("embedding request to {} ({} texts): {}", config_.endpoint, texts.size(),
             excerpt(body, 2000));

  int attempts = 0;
  const auto response = with_retry(
      config_.retry,
      [&] {
        auto r = transport_->post_json(config_.endpoint, body, headers, config_.timeout);
        if (r.status < 200 || r.status >= 300) throw ServiceError(r.status, excerpt(r.body));
        return r;
      },
      attempts, sleep_);
  spdlog::debug("embedding response after {} attempt(s): {}", attempts, excerpt(response.body, 2000));
  return parse_embedding_response(response.body, texts.size());
}

std::vector<std::vector<float>> HttpEmbedder::embed(std::span<const std::string> texts) {
  const std::size_t chunks = (texts.size() + config_.batch_size - 1) / config_.batch_size;
  std::vector<std::vector<std::vector<float>>> parts(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      const std::size_t begin = c * config_.batch_size;
      const std::size_t len = std::min(config_.batch_size, texts.size() - begin);
      try {
        parts[c] = embed_chunk(texts.subspan(begin, len));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config_.max_inflight), chunks);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    if (workers > 0) worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (auto& p : parts) {
    for (auto& v : p) out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, Embedder& client,
                                         std::span<const std::string> ids) {
  if (!ids.empty() && ids.size() != texts.size()) {
    throw ValidationError("embed_batch: " + std::to_string(ids.size()) + " ids for " +
                          std::to_string(texts.size()) + " texts");
  }
  if (texts.empty()) return {};
  auto raw = client.embed(texts);
  if (raw.size() != texts.size()) {
    throw ProtocolError("embedder returned " + std::to_string(raw.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
  }
  const std::size_t dim = client.dim() != 0 ? client.dim() : raw.front().size();
  std::vector<EmbeddingVector> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string id = ids.empty() ? std::to_string(i) : ids[i];
    if (raw[i].size() != dim || dim == 0) {
      throw ProtocolError("embedding for '" + id + "' has dimension " + std::to_string(raw[i].size()) +
                          ", expected " + std::to_string(dim));
    }
    normalize(raw[i], id);
    out.push_back({std::move(id), std::move(raw[i])});
  }
  return out;
}

}  // namespace lyra
