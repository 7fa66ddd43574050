#include "vulngraph/encoders/embedding_cache.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "vulngraph/common/error.hpp"

namespace vulngraph::encoders {

namespace {

constexpr char kMagic[8] = {'V', 'G', 'E', 'M', 'B', 'E', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ParseError("embedding cache truncated");
  return v;
}

}  // namespace

EmbeddingCache EmbeddingCache::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open embedding cache " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw ParseError("bad embedding cache magic in " + path);
  auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion)
    throw ParseError("unsupported embedding cache version " +
                     std::to_string(version));
  auto dim = read_pod<std::uint32_t>(is);
  auto count = read_pod<std::uint64_t>(is);
  EmbeddingCache cache;
  cache.dim_ = dim;
  for (std::uint64_t r = 0; r < count; ++r) {
    auto id_len = read_pod<std::uint32_t>(is);
    std::string id(id_len, '\0');
    is.read(id.data(), id_len);
    if (!is) throw ParseError("embedding cache truncated");
    std::vector<double> vec(dim);
    is.read(reinterpret_cast<char*>(vec.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
    if (!is) throw ParseError("embedding cache truncated");
    cache.entries_.emplace(std::move(id), std::move(vec));
  }
  return cache;
}

void EmbeddingCache::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write embedding cache " + path);
  os.write(kMagic, 8);
  write_pod(os, kVersion);
  write_pod(os, static_cast<std::uint32_t>(dim_));
  write_pod(os, static_cast<std::uint64_t>(entries_.size()));
  for (const auto& [id, vec] : entries_) {
    write_pod(os, static_cast<std::uint32_t>(id.size()));
    os.write(id.data(), static_cast<std::streamsize>(id.size()));
    os.write(reinterpret_cast<const char*>(vec.data()),
             static_cast<std::streamsize>(vec.size() * sizeof(double)));
  }
  if (!os) throw Error("short write to embedding cache " + path);
}

void EmbeddingCache::put(const std::string& id, std::vector<double> vec) {
  if (dim_ == 0 && entries_.empty()) {
    dim_ = vec.size();
  } else if (vec.size() != dim_) {
    throw DimensionMismatchError(dim_, vec.size());
  }
  entries_[id] = std::move(vec);
}

std::optional<std::vector<double>> EmbeddingCache::get(
    const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool EmbeddingCache::contains(const std::string& id) const {
  return entries_.count(id) > 0;
}

void EmbeddingCache::export_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot write csv " + path);
  os << "id";
  for (std::size_t j = 0; j < dim_; ++j) os << ",v" << j;
  os << "\n";
  char buf[32];
  for (const auto& [id, vec] : entries_) {
    os << id;
    for (double v : vec) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << ',' << buf;
    }
    os << "\n";
  }
}

}  // namespace vulngraph::encoders
