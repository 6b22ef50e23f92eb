#include <bit>
#include <cstring>

#include "lyra/error.hpp"
#include "lyra/io.hpp"
#include "lyra/retrieval.hpp"

namespace lyra {

namespace {

constexpr char kMagic[8] = {'L', 'Y', 'R', 'A', 'E', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_string(std::string& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t uint(int width) {
    need(width);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError("index file truncated at byte " + std::to_string(pos_));
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_index(const EmbeddingIndex& index) {
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(index.dim()));
  put_u64(out, index.size());
  put_string(out, index.meta().model);
  put_string(out, index.meta().built_at);
  for (std::size_t i = 0; i < index.size(); ++i) {
    put_string(out, index.id(i));
    for (float x : index.vector(i)) put_u32(out, std::bit_cast<std::uint32_t>(x));
  }
  return out;
}

EmbeddingIndex deserialize_index(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) {
    throw ParseError("not an embedding index file (bad magic)");
  }
  const auto version = in.uint(4);
  if (version != kVersion) throw ParseError("unsupported index version " + std::to_string(version));

  EmbeddingIndex index;
  index.dim_ = static_cast<std::size_t>(in.uint(4));
  const auto count = in.uint(8);
  index.meta_.model = std::string(in.take(in.uint(4)));
  index.meta_.built_at = std::string(in.take(in.uint(4)));
  if (count > 0 && index.dim_ == 0) throw ParseError("index has entries but dimension 0");
  for (std::uint64_t i = 0; i < count; ++i) {
    index.ids_.emplace_back(in.take(in.uint(4)));
    for (std::size_t d = 0; d < index.dim_; ++d) {
      index.data_.push_back(std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4))));
    }
  }
  if (!in.done()) throw ParseError("trailing bytes after index records");
  return index;
}

void save_index(const EmbeddingIndex& index, const std::filesystem::path& path) {
  write_file(path, serialize_index(index));
}

EmbeddingIndex load_index(const std::filesystem::path& path) {
  try {
    return deserialize_index(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace lyra
