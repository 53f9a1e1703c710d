#pragma once

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace emc::io {

using json = nlohmann::json;

/// Writes values as little-endian IEEE float32, independent of host byte order.
void write_f32_le(const std::filesystem::path& path, std::span<const double> values);

/// Reads a little-endian float32 file. Throws ValidationError if the file is
/// missing or does not hold exactly `expected_count` values.
std::vector<double> read_f32_le(const std::filesystem::path& path, std::size_t expected_count);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& value);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Throws ValidationError naming `what` when the file does not exist.
void require_file(const std::filesystem::path& path, const std::string& what);

} // namespace emc::io
