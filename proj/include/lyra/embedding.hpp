#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lyra/http_transport.hpp"
#include "lyra/retrieval.hpp"
#include "lyra/retry.hpp"

namespace lyra {

inline constexpr const char* kDefaultEmbeddingModel = "BAAI/bge-multilingual-gemma2";

/// Text-to-vector service. Implementations must be safe to call from
/// several threads.
class Embedder {
 public:
  virtual ~Embedder() = default;
  /// Expected output dimension, or 0 when only known after the first call.
  virtual std::size_t dim() const = 0;
  virtual std::string model_id() const = 0;
  /// One raw (not necessarily normalized) vector per text, in order.
  virtual std::vector<std::vector<float>> embed(std::span<const std::string> texts) = 0;
};

/// Hashed character-trigram counts, L2-normalized. The text is framed with
/// U+0002 / U+0003 so every non-empty text has at least one trigram; each
/// trigram's UTF-8 bytes are hashed with 64-bit FNV-1a into `dim` buckets.
/// Throws ValidationError when dim < 8.
EmbeddingVector fallback_embed(std::string_view text, std::size_t dim);

class FallbackEmbedder final : public Embedder {
 public:
  explicit FallbackEmbedder(std::size_t dim);
  std::size_t dim() const override { return dim_; }
  std::string model_id() const override;
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

 private:
  std::size_t dim_;
};

struct HttpEmbedderConfig {
  /// Full URL of the embeddings route, e.g. http://localhost:8080/v1/embeddings
  std::string endpoint;
  std::string model = kDefaultEmbeddingModel;
  std::string auth_token;
  std::size_t expected_dim = 0;
  std::size_t batch_size = 32;
  int max_inflight = 4;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
};

/// POSTs {"model": ..., "input": [...]} and accepts either the
/// {"data": [{"index": i, "embedding": [...]}, ...]} shape or a bare array
/// of vectors.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(HttpEmbedderConfig config, std::shared_ptr<HttpTransport> transport,
               Sleeper sleep = real_sleep);
  std::size_t dim() const override { return config_.expected_dim; }
  std::string model_id() const override { return config_.model; }
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

 private:
  std::vector<std::vector<float>> embed_chunk(std::span<const std::string> texts);

  HttpEmbedderConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleep_;
};

/// Parses an embeddings response body. Throws ProtocolError when the shape
/// is wrong or the vector count differs from `expected_count`.
std::vector<std::vector<float>> parse_embedding_response(const std::string& body,
                                                         std::size_t expected_count);

/// Embeds `texts` and returns unit-norm vectors in input order. `ids` labels
/// the results; when empty the ids are "0", "1", ... Throws ProtocolError if
/// the service returns the wrong count, a wrong or inconsistent dimension,
/// or a zero vector.
std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, Embedder& client,
                                         std::span<const std::string> ids = {});

}  // namespace lyra
