#include "resmap/probseg/checkpoint.hpp"

#include <cstring>
#include <string>

#include "resmap/errors.hpp"
#include "resmap/io/fgrid.hpp"

namespace resmap::probseg {

using io::Json;

std::vector<std::uint8_t> encode_checkpoint(const ProbUNet<float>& model,
                                            const CheckpointMeta& meta) {
  Json tensors = Json::array();
  for (const auto& p : model.params()) tensors.push_back(Json{{"name", p.name}, {"shape", p.value.shape()}});
  const Json header{{"config", model.config().to_json()},
                    {"step", meta.step},
                    {"seed", meta.seed},
                    {"train", meta.train},
                    {"tensors", tensors}};
  const std::string text = header.dump();

  io::ByteWriter w;
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>("FGCK"), 4));
  w.u32(kCheckpointVersion);
  w.u64(text.size());
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  for (const auto& p : model.params())
    for (float v : p.value.values()) w.f32(v);
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw DataError("checkpoint: truncated header");
  if (std::memcmp(bytes.data(), "FGCK", 4) != 0) throw DataError("checkpoint: bad magic");
  io::ByteReader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint64_t length = r.u64();
  if (length > r.remaining()) throw DataError("checkpoint: truncated header");
  const auto text = r.raw(static_cast<std::size_t>(length));
  Json header;
  try {
    header = Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw DataError(std::string("checkpoint: bad header: ") + e.what());
  }

  Checkpoint out;
  UNetConfig config;
  try {
    parse(header.at("config"), config, "checkpoint.config");
    out.meta.step = header.at("step").get<std::int64_t>();
    out.meta.seed = header.at("seed").get<std::uint64_t>();
    out.meta.train = header.at("train");
    out.model = ProbUNet<float>(config, 0);
    const Json& tensors = header.at("tensors");
    if (tensors.size() != out.model.params().size()) {
      throw DataError("checkpoint: expected " + std::to_string(out.model.params().size()) +
                      " tensors, found " + std::to_string(tensors.size()));
    }
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      auto& param = out.model.params()[i];
      const auto name = tensors[i].at("name").get<std::string>();
      const auto shape = tensors[i].at("shape").get<Shape>();
      if (name != param.name || shape != param.value.shape()) {
        throw DataError("checkpoint: tensor " + name + " " + tensor::to_string(shape) +
                        " does not match model parameter " + param.name + " " +
                        tensor::to_string(param.value.shape()));
      }
      if (r.remaining() / 4 < param.value.size()) throw DataError("checkpoint: truncated payload");
      for (auto& v : param.value.values()) v = r.f32();
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  }
  if (r.remaining() != 0) throw DataError("checkpoint: trailing bytes after payload");
  return out;
}

void write_checkpoint(const std::filesystem::path& path, const ProbUNet<float>& model,
                      const CheckpointMeta& meta) {
  io::write_bytes(path, encode_checkpoint(model, meta));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(io::read_bytes(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace resmap::probseg
