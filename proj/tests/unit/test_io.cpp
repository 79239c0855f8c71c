#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>

#include "resmap/errors.hpp"
#include "resmap/io/fgrid.hpp"
#include "resmap/io/json_util.hpp"
#include "resmap/io/palette.hpp"
#include "resmap/rng.hpp"

namespace {

using namespace resmap;
using namespace resmap::io;
namespace fs = std::filesystem;

fs::path golden(const std::string& name) { return fs::path(RESMAP_GOLDEN_DIR) / name; }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("resmap_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Random raster of either dtype. f32 payloads use raw bit patterns, NaN
// payloads and signed zeros included, so equality is checked on bits.
Raster random_raster(Rng& rng) {
  const auto w = static_cast<std::uint32_t>(1 + rng.below(24));
  const auto h = static_cast<std::uint32_t>(1 + rng.below(24));
  const auto c = static_cast<std::uint32_t>(1 + rng.below(6));
  const double res = rng.uniform(0.01, 100.0);
  if (rng.below(2) == 0) {
    Raster r = Raster::make_u8(w, h, c, res);
    for (auto& v : r.u8) v = static_cast<std::uint8_t>(rng.below(256));
    return r;
  }
  Raster r = Raster::make_f32(w, h, c, res);
  for (auto& v : r.f32) v = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next_u64()));
  return r;
}

bool bit_identical(const Raster& a, const Raster& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels ||
      a.dtype != b.dtype || std::bit_cast<std::uint64_t>(a.resolution) !=
                                std::bit_cast<std::uint64_t>(b.resolution)) {
    return false;
  }
  if (a.u8 != b.u8 || a.f32.size() != b.f32.size()) return false;
  for (std::size_t i = 0; i < a.f32.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(a.f32[i]) != std::bit_cast<std::uint32_t>(b.f32[i])) {
      return false;
    }
  }
  return true;
}

TEST(Fgrid, RoundTripFiveChannelTileThroughFile) {
  Rng rng(5);
  Raster r = Raster::make_f32(64, 64, 5, 0.5);
  for (auto& v : r.f32) v = static_cast<float>(rng.uniform());
  const fs::path path = scratch_dir("tile") / "tile.fgrid";
  write_fgrid(path, r);
  EXPECT_EQ(fs::file_size(path), kFgridHeaderSize + 64u * 64 * 5 * 4);
  EXPECT_TRUE(bit_identical(read_fgrid(path), r));
}

TEST(Fgrid, RoundTripRandomRastersBitExact) {
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const Raster r = random_raster(rng);
    const auto bytes = encode_fgrid(r);
    ASSERT_TRUE(bit_identical(decode_fgrid(bytes), r)) << "case " << i;
    ASSERT_EQ(encode_fgrid(decode_fgrid(bytes)), bytes) << "case " << i;
  }
}

TEST(Fgrid, U8HeaderMatchesHandAssembledBytes) {
  Raster r = Raster::make_u8(3, 2, 1, 0.5);
  r.u8 = {0, 1, 2, 3, 4, 255};
  EXPECT_EQ(encode_fgrid(r), read_bytes(golden("u8_3x2.fgrid")));
}

TEST(Fgrid, F32PayloadMatchesHandAssembledBytes) {
  Raster r = Raster::make_f32(2, 1, 2, 0.25);
  r.f32 = {1.0f, -2.5f, 0.125f, 3.0f};
  const auto expected = read_bytes(golden("f32_2x1x2.fgrid"));
  EXPECT_EQ(encode_fgrid(r), expected);
  EXPECT_TRUE(bit_identical(decode_fgrid(expected), r));
}

TEST(Fgrid, HeaderFieldOffsets) {
  const auto bytes = read_bytes(golden("u8_3x2.fgrid"));
  ASSERT_EQ(bytes.size(), kFgridHeaderSize + 6);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FGRD");
  EXPECT_EQ(bytes[4], 1);   // version, little-endian
  EXPECT_EQ(bytes[8], 3);   // width
  EXPECT_EQ(bytes[12], 2);  // height
  EXPECT_EQ(bytes[16], 1);  // channels
  EXPECT_EQ(bytes[20], 1);  // dtype u8
  EXPECT_EQ(bytes[28], 0x3f);  // top byte of 0.5 as f64
}

void expect_data_error(std::span<const std::uint8_t> bytes, const std::string& fragment) {
  try {
    decode_fgrid(bytes);
    ADD_FAILURE() << "expected DataError containing '" << fragment << "'";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Fgrid, TruncatedPayloadIsReported) {
  auto bytes = read_bytes(golden("f32_2x1x2.fgrid"));
  bytes.pop_back();
  expect_data_error(bytes, "truncated payload");
  bytes.resize(kFgridHeaderSize + 3);
  expect_data_error(bytes, "truncated payload");
}

TEST(Fgrid, TruncatedFileOnDiskIsReported) {
  Raster r = Raster::make_u8(8, 8, 1);
  auto bytes = encode_fgrid(r);
  bytes.resize(bytes.size() - 10);
  const fs::path path = scratch_dir("trunc") / "t.fgrid";
  write_bytes(path, bytes);
  try {
    read_fgrid(path);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("truncated payload"), std::string::npos);
    EXPECT_NE(msg.find("t.fgrid"), std::string::npos);
  }
}

TEST(Fgrid, HeaderCorruptionIsRejected) {
  const auto good = read_bytes(golden("u8_3x2.fgrid"));
  auto bad = good;
  bad[0] = 'X';
  expect_data_error(bad, "bad magic");
  bad = good;
  bad[4] = 2;
  expect_data_error(bad, "unsupported version");
  bad = good;
  bad[20] = 7;
  expect_data_error(bad, "unknown dtype");
  expect_data_error(std::span(good).first(10), "truncated header");
  bad = good;
  bad.push_back(0);
  expect_data_error(bad, "trailing bytes");
}

TEST(Fgrid, MissingFileIsDataError) {
  EXPECT_THROW(read_fgrid(scratch_dir("missing") / "nope.fgrid"), DataError);
}

TEST(Fgrid, InconsistentRasterRefusesToEncode) {
  Raster r = Raster::make_f32(4, 4, 1);
  r.f32.pop_back();
  EXPECT_THROW(encode_fgrid(r), ShapeError);
}

TEST(Palette, AllNoneMapIsUniformDarkBrown) {
  const auto bytes = encode_level_ppm(LevelMap(5, 3, 0));
  const std::string header = "P6\n5 3\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 5 * 3 * 3);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + header.size()), header);
  for (std::size_t i = header.size(); i < bytes.size(); i += 3) {
    EXPECT_EQ(bytes[i], 74);
    EXPECT_EQ(bytes[i + 1], 44);
    EXPECT_EQ(bytes[i + 2], 23);
  }
}

TEST(Palette, LevelsHaveDistinctColors) {
  std::set<std::tuple<int, int, int>> seen;
  for (const Rgb& c : kLevelPalette) seen.insert({c.r, c.g, c.b});
  EXPECT_EQ(seen.size(), static_cast<std::size_t>(kNumLevels));
}

TEST(Palette, Golden4x4) {
  LevelMap m(4, 4);
  const std::uint8_t grid[4][4] = {{0, 1, 2, 3}, {4, 0, 1, 2}, {3, 4, 0, 1}, {2, 3, 4, 0}};
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) m.at(y, x) = grid[y][x];
  EXPECT_EQ(encode_level_ppm(m), read_bytes(golden("levels_4x4.ppm")));
}

TEST(Palette, InvalidLevelIsRejected) {
  LevelMap m(2, 2, 0);
  m.levels[3] = 5;
  EXPECT_THROW(encode_level_ppm(m), ShapeError);
}

TEST(Palette, GrayscaleMapsRangeAndClips) {
  const std::vector<float> v{0.0f, 0.5f, 1.0f, 2.0f, -1.0f, 0.25f};
  const auto bytes = encode_gray_pgm(v, 3, 2, 0.0f, 1.0f);
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 6);
  const std::vector<std::uint8_t> px(bytes.begin() + header.size(), bytes.end());
  EXPECT_EQ(px, (std::vector<std::uint8_t>{0, 128, 255, 255, 0, 64}));
}

TEST(Palette, MaskPgm) {
  const std::vector<std::uint8_t> mask{0, 1, 7, 0};
  const auto bytes = encode_mask_pgm(mask, 2, 2);
  const std::vector<std::uint8_t> px(bytes.end() - 4, bytes.end());
  EXPECT_EQ(px, (std::vector<std::uint8_t>{0, 255, 255, 0}));
}

TEST(Json, WriteIsCanonicalAndReadsBack) {
  const fs::path path = scratch_dir("json") / "a" / "b.json";
  const Json v{{"zeta", 1}, {"alpha", {1.5, "x"}}};
  write_json(path, v);
  EXPECT_EQ(read_json(path), v);
  const auto bytes = read_bytes(path);
  const std::string text(bytes.begin(), bytes.end());
  EXPECT_LT(text.find("alpha"), text.find("zeta"));
  EXPECT_EQ(text.back(), '\n');
}

TEST(Json, ParseErrorIsDataError) {
  const fs::path path = scratch_dir("badjson") / "bad.json";
  const std::string text = "{\"a\": ";
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  EXPECT_THROW(read_json(path), DataError);
}

TEST(Json, UnknownKeyNamesLocation) {
  try {
    require_object(Json{{"ok", 1}, {"typo", 2}}, {"ok"}, "config.scene");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("config.scene"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("typo"), std::string::npos);
  }
}

TEST(Json, FieldTypeMismatchNamesLocation) {
  double d = 0;
  try {
    read_field(Json{{"beta", "high"}}, "beta", d, "config.train");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("config.train.beta"), std::string::npos);
  }
}

TEST(Json, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

}  // namespace
