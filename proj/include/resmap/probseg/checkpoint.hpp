#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "resmap/io/json_util.hpp"
#include "resmap/probseg/model.hpp"

namespace resmap::probseg {

/// Checkpoint container, little-endian:
///
///   "FGCK" | u32 version | u64 header length | header JSON (UTF-8) | payload
///
/// The header holds the model config, step count, seed, free-form training
/// metadata and the ordered list of {name, shape}. The payload is every
/// tensor's f32 data in that order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::int64_t step = 0;
  std::uint64_t seed = 0;
  io::Json train = io::Json::object();  // e.g. the TrainConfig used
};

struct Checkpoint {
  ProbUNet<float> model;
  CheckpointMeta meta;
};

std::vector<std::uint8_t> encode_checkpoint(const ProbUNet<float>& model, const CheckpointMeta& meta);
/// Throws DataError on a malformed or inconsistent container.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path, const ProbUNet<float>& model,
                      const CheckpointMeta& meta);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace resmap::probseg
