#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lyra {

/// Number of retrieved examples per query used throughout the pipeline.
inline constexpr std::size_t kDefaultRetrievalK = 10;

struct EmbeddingVector {
  std::string pair_id;
  std::vector<float> values;

  std::size_t dim() const noexcept { return values.size(); }
};

struct RetrievalHit {
  std::string pair_id;
  double score = 0.0;

  friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

/// Total order on hits: higher score first, then ascending pair_id.
bool hit_before(const RetrievalHit& a, const RetrievalHit& b) noexcept;

/// Cosine similarity in double precision, clamped to [-1, 1].
/// Throws ValidationError on a dimension mismatch or an all-zero vector.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct IndexMeta {
  std::string model;
  std::string built_at;

  friend bool operator==(const IndexMeta&, const IndexMeta&) = default;
};

/// Immutable exact-search index over unit-normalized vectors.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;

  /// Normalizes every vector. Throws ValidationError naming the offending
  /// pair id on a dimension mismatch, a duplicate id or a zero vector.
  static EmbeddingIndex build(std::span<const EmbeddingVector> vectors, IndexMeta meta = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const IndexMeta& meta() const noexcept { return meta_; }

  const std::string& id(std::size_t i) const { return ids_[i]; }
  /// Stored (normalized) vector of entry i.
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  friend bool operator==(const EmbeddingIndex&, const EmbeddingIndex&) = default;

 private:
  friend EmbeddingIndex deserialize_index(std::string_view bytes);

  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  IndexMeta meta_;
};

/// Exact top-k by cosine similarity; min(k, size) hits ordered by hit_before.
/// Scores are dot products of the stored unit vectors with the normalized
/// query, accumulated in double. Throws ValidationError on a dimension
/// mismatch, a zero query or k == 0.
std::vector<RetrievalHit> query_knn(const EmbeddingIndex& index, std::span<const float> query,
                                    std::size_t k = kDefaultRetrievalK);

// Binary persistence. Layout (all integers little-endian):
//   magic "LYRAEIDX" | u32 version (=1) | u32 dim | u64 count
//   | u32 len, model bytes | u32 len, built_at bytes
//   | count x (u32 id length | id bytes | dim x f32)
std::string serialize_index(const EmbeddingIndex& index);
EmbeddingIndex deserialize_index(std::string_view bytes);
void save_index(const EmbeddingIndex& index, const std::filesystem::path& path);
EmbeddingIndex load_index(const std::filesystem::path& path);

}  // namespace lyra
