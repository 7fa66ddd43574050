#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vulngraph::encoders {

/// On-disk vector cache keyed by sample id. Binary layout (little
/// endian, as written on x86):
///   magic   8 bytes  "VGEMBED\0"
///   version u32      1
///   dim     u32      vector width (0 until the first put)
///   count   u64
///   count * { id_len u32, id bytes, dim * f64 }
/// Records are stored sorted by id, so saves are byte-deterministic.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;

  static EmbeddingCache load(const std::string& path);  // ParseError
  void save(const std::string& path) const;

  /// Throws DimensionMismatchError if the width differs from dim().
  void put(const std::string& id, std::vector<double> vec);
  std::optional<std::vector<double>> get(const std::string& id) const;
  bool contains(const std::string& id) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }

  /// id,v0,v1,... with 17 significant digits (round-trip exact).
  void export_csv(const std::string& path) const;

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>> entries_;
};

}  // namespace vulngraph::encoders
