#pragma once

#include <map>
#include <string>

#include "panosr/autograd/nn.hpp"

namespace panosr::ag {

// Single-file parameter archive keyed by module path. Layout:
//   magic "PSRCKPT1" | u32 meta_len | meta json | u64 count |
//   per entry: u32 name_len, name, u32 ndim, i64 dims[], f64 data[]
// Little-endian throughout.
void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::map<std::string, std::string>& meta = {});

struct CheckpointMeta {
  std::map<std::string, std::string> entries;
  std::string get(const std::string& key, const std::string& fallback = "") const {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
  }
};

// Loads values into an existing store; every archive entry must match an
// existing parameter name and shape, and vice versa.
CheckpointMeta load_checkpoint(const std::string& path, ParamStore& store);

CheckpointMeta read_checkpoint_meta(const std::string& path);

}  // namespace panosr::ag
