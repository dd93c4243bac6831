#pragma once

#include <string>

#include "aor/split_model.hpp"

namespace aor {

// Checkpoint file layout (extension .aorm):
//   bytes 0..3   magic "AORM"
//   bytes 4..7   version, unsigned 32-bit little-endian (currently 1)
//   bytes 8..15  header length, unsigned 64-bit little-endian
//   header       UTF-8 JSON: config, parameter names/shapes/order,
//                trainable flags, seed, stage tag
//   payload      concatenated row-major little-endian 64-bit-real blobs
//                in the declared parameter order
// save(load(save(m))) is byte-identical; load reproduces every parameter bit
// for bit.

inline constexpr char kCheckpointMagic[4] = {'A', 'O', 'R', 'M'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const SplitModel& model, const std::string& path);
SplitModel load_checkpoint(const std::string& path);

} // namespace aor
