#include "vulngraph/fusion/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "vulngraph/common/error.hpp"
#include "vulngraph/tensor/tensor.hpp"

namespace vulngraph::fusion {

using tensor::Tensor;

namespace {

constexpr char kMagic[8] = {'V', 'G', 'C', 'K', 'P', 'T', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("truncated checkpoint: " + path);
  return value;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& meta,
                     const encoders::Params& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  write_pod(out, static_cast<std::uint64_t>(params.size()));
  for (const auto& [name, tensor] : params) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::uint64_t>(tensor.rows()));
    write_pod(out, static_cast<std::uint64_t>(tensor.cols()));
    const auto data = tensor.data();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  if (!out) throw Error("short write while saving checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a checkpoint file: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw ParseError("unsupported checkpoint version " +
                     std::to_string(version) + ": " + path);
  }
  Checkpoint ckpt;
  const auto meta_len = read_pod<std::uint64_t>(in, path);
  ckpt.meta.resize(meta_len);
  in.read(ckpt.meta.data(), static_cast<std::streamsize>(meta_len));
  if (!in) throw ParseError("truncated checkpoint: " + path);
  const auto count = read_pod<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw ParseError("truncated checkpoint: " + path);
    const auto rows = read_pod<std::uint64_t>(in, path);
    const auto cols = read_pod<std::uint64_t>(in, path);
    std::vector<double> data(rows * cols);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in) throw ParseError("truncated checkpoint: " + path);
    ckpt.params.emplace_back(
        name, Tensor::from_data({static_cast<std::size_t>(rows),
                                 static_cast<std::size_t>(cols)},
                                std::move(data)));
  }
  return ckpt;
}

void load_into(const Checkpoint& ckpt, encoders::Params& target) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& [name, tensor] : ckpt.params) by_name[name] = &tensor;
  if (by_name.size() != ckpt.params.size()) {
    throw ParseError("checkpoint has duplicate tensor names");
  }
  for (auto& [name, tensor] : target) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw ParseError("checkpoint is missing tensor: " + name);
    }
    const Tensor& src = *it->second;
    if (src.shape() != tensor.shape()) {
      throw ShapeMismatchError("checkpoint tensor " + name,
                               tensor::shape_to_string(tensor.shape()),
                               tensor::shape_to_string(src.shape()));
    }
    auto dst = tensor.mutable_data();
    const auto values = src.data();
    std::copy(values.begin(), values.end(), dst.begin());
    by_name.erase(it);
  }
  if (!by_name.empty()) {
    throw ParseError("checkpoint has unexpected tensor: " +
                     by_name.begin()->first);
  }
}

}  // namespace vulngraph::fusion
