#pragma once

#include <filesystem>

#include "cim/tensor.hpp"

namespace cim {

// CIMW checkpoint format (bit-exact, all little-endian):
//   magic "CIMW" | version u32 | tensor count u32 |
//   per tensor: name byte-length u32 | UTF-8 name | rank u32 |
//               extents u32 each | row-major IEEE-754 binary32 payload
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const ParamMap& params);
ParamMap load_checkpoint(const std::filesystem::path& path);

}  // namespace cim
