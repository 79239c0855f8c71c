#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "resmap/errors.hpp"

namespace resmap::io {

using Json = nlohmann::json;

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with sorted keys and a trailing newline, so equal values
/// produce byte-identical files.
void write_json(const std::filesystem::path& path, const Json& value);

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_hex(std::string_view data);
/// Digest of the canonical serialization of a JSON value.
std::string params_hash(const Json& value);

/// Throws DataError unless `obj` is an object whose keys all appear in
/// `allowed`. `where` names the object in the message, e.g. "config.scene".
void require_object(const Json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where);

/// Overwrites `out` with obj[key] when present; a type mismatch becomes a
/// DataError naming where.key.
template <class T>
void read_field(const Json& obj, std::string_view key, T& out, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const Json::exception& e) {
    throw DataError(std::string(where) + "." + std::string(key) + ": " + e.what());
  }
}

}  // namespace resmap::io
