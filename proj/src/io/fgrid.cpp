#include "resmap/io/fgrid.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "resmap/errors.hpp"

namespace resmap::io {

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) throw DataError("truncated data: need " + std::to_string(n) + " bytes");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  need(n);
  auto out = bytes_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::vector<std::uint8_t> encode_fgrid(const Raster& raster) {
  raster.validate();
  ByteWriter w;
  w.raw(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("FGRD"), 4));
  w.u32(kFgridVersion);
  w.u32(raster.width);
  w.u32(raster.height);
  w.u32(raster.channels);
  w.u8(static_cast<std::uint8_t>(raster.dtype));
  w.f64(raster.resolution);
  if (raster.dtype == Dtype::kF32) {
    for (float v : raster.f32) w.f32(v);
  } else {
    w.raw(raster.u8);
  }
  return std::move(w.bytes());
}

Raster decode_fgrid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFgridHeaderSize) throw DataError("FGRID: truncated header");
  if (std::memcmp(bytes.data(), "FGRD", 4) != 0) throw DataError("FGRID: bad magic");
  ByteReader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  if (version != kFgridVersion) {
    throw DataError("FGRID: unsupported version " + std::to_string(version));
  }
  Raster out;
  out.width = r.u32();
  out.height = r.u32();
  out.channels = r.u32();
  const std::uint8_t dtype = r.u8();
  if (dtype > 1) throw DataError("FGRID: unknown dtype " + std::to_string(dtype));
  out.dtype = static_cast<Dtype>(dtype);
  out.resolution = r.f64();

  const std::size_t count = out.sample_count();
  const std::size_t elem = out.dtype == Dtype::kF32 ? 4 : 1;
  if (count != 0 && r.remaining() / elem < count) throw DataError("FGRID: truncated payload");
  if (r.remaining() != count * elem) throw DataError("FGRID: trailing bytes after payload");
  if (out.dtype == Dtype::kF32) {
    out.f32.resize(count);
    for (auto& v : out.f32) v = r.f32();
  } else {
    auto payload = r.raw(count);
    out.u8.assign(payload.begin(), payload.end());
  }
  return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

void write_fgrid(const std::filesystem::path& path, const Raster& raster) {
  write_bytes(path, encode_fgrid(raster));
}

Raster read_fgrid(const std::filesystem::path& path) {
  try {
    return decode_fgrid(read_bytes(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace resmap::io
