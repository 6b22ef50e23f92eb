#include "lyra/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_set>

#include "lyra/error.hpp"

namespace lyra {

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine_similarity: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace

bool hit_before(const RetrievalHit& a, const RetrievalHit& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return a.pair_id < b.pair_id;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  return cosine_impl(a, b);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  return cosine_impl(a, b);
}

EmbeddingIndex EmbeddingIndex::build(std::span<const EmbeddingVector> vectors, IndexMeta meta) {
  EmbeddingIndex index;
  index.meta_ = std::move(meta);
  if (vectors.empty()) return index;

  index.dim_ = vectors.front().dim();
  if (index.dim_ == 0) {
    throw ValidationError("vector '" + vectors.front().pair_id + "' has dimension 0");
  }
  index.ids_.reserve(vectors.size());
  index.data_.reserve(vectors.size() * index.dim_);
  std::unordered_set<std::string> seen;
  for (const auto& v : vectors) {
    if (v.dim() != index.dim_) {
      throw ValidationError("vector '" + v.pair_id + "' has dimension " + std::to_string(v.dim()) +
                            ", expected " + std::to_string(index.dim_));
    }
    if (!seen.insert(v.pair_id).second) {
      throw ValidationError("duplicate pair id '" + v.pair_id + "' in index input");
    }
    double norm = 0.0;
    for (float x : v.values) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw ValidationError("vector '" + v.pair_id + "' cannot be normalized");
    }
    for (float x : v.values) index.data_.push_back(static_cast<float>(x / norm));
    index.ids_.push_back(v.pair_id);
  }
  return index;
}

std::vector<RetrievalHit> query_knn(const EmbeddingIndex& index, std::span<const float> query,
                                    std::size_t k) {
  if (k == 0) throw ValidationError("query_knn: k must be positive");
  if (index.empty()) return {};
  if (query.size() != index.dim()) {
    throw ValidationError("query dimension " + std::to_string(query.size()) +
                          " does not match index dimension " + std::to_string(index.dim()));
  }
  double norm = 0.0;
  for (float x : query) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw ValidationError("query_knn: zero query vector");
  std::vector<double> q(query.begin(), query.end());
  for (auto& x : q) x /= norm;

  struct Scored {
    double score;
    std::size_t row;
  };
  // Ordered by "ranks before", so top() is the weakest hit kept so far.
  const auto better = [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return index.id(a.row) < index.id(b.row);
  };
  std::priority_queue<Scored, std::vector<Scored>, decltype(better)> heap(better);
  const std::size_t keep = std::min(k, index.size());
  for (std::size_t row = 0; row < index.size(); ++row) {
    const auto v = index.vector(row);
    double dot = 0.0;
    for (std::size_t d = 0; d < q.size(); ++d) dot += static_cast<double>(v[d]) * q[d];
    Scored s{std::clamp(dot, -1.0, 1.0), row};
    if (heap.size() < keep) {
      heap.push(s);
    } else if (better(s, heap.top())) {
      heap.pop();
      heap.push(s);
    }
  }
  std::vector<RetrievalHit> hits;
  hits.reserve(heap.size());
  while (!heap.empty()) {
    hits.push_back({index.id(heap.top().row), heap.top().score});
    heap.pop();
  }
  std::reverse(hits.begin(), hits.end());
  return hits;
}

}  // namespace lyra
