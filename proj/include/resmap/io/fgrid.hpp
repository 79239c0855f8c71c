#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "resmap/raster.hpp"

namespace resmap::io {

/// FGRID raster container, little-endian, no padding:
///
///   offset  size  field
///        0     4  magic "FGRD"
///        4     4  version (u32, currently 1)
///        8     4  width (u32)
///       12     4  height (u32)
///       16     4  channels (u32)
///       20     1  dtype (u8: 0 = f32, 1 = u8)
///       21     8  resolution in m/pixel (f64)
///       29     -  payload, row-major, channel-last
inline constexpr std::uint32_t kFgridVersion = 1;
inline constexpr std::size_t kFgridHeaderSize = 29;

std::vector<std::uint8_t> encode_fgrid(const Raster& raster);
Raster decode_fgrid(std::span<const std::uint8_t> bytes);

void write_fgrid(const std::filesystem::path& path, const Raster& raster);
Raster read_fgrid(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Little-endian primitive encoding shared by the binary formats.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void raw(std::span<const std::uint8_t> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::span<const std::uint8_t> raw(std::size_t n);

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace resmap::io
