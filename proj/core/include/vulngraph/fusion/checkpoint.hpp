#pragma once

#include <string>

#include "vulngraph/encoders/layers.hpp"

namespace vulngraph::fusion {

/// On-disk model snapshot. Layout (little-endian):
///   magic "VGCKPT\0\0" | version u32=1 | meta_len u64 | meta bytes (JSON)
///   | count u64 | per tensor: name_len u32, name bytes, rows u64,
///   cols u64, rows*cols f64
/// Tensors are written in the order given, so saves of the same model
/// are byte-identical.
struct Checkpoint {
  std::string meta;  // JSON string, caller-defined schema
  encoders::Params params;
};

void save_checkpoint(const std::string& path, const std::string& meta,
                     const encoders::Params& params);  // Error on I/O failure

Checkpoint load_checkpoint(const std::string& path);  // ParseError

/// Copies checkpoint values into an existing parameter list, matching
/// by name. Every target parameter must be present with the same shape
/// (ParseError / ShapeMismatchError otherwise); extra checkpoint
/// entries are also an error.
void load_into(const Checkpoint& ckpt, encoders::Params& target);

}  // namespace vulngraph::fusion
