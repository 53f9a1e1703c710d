#include "emc/io.hpp"

#include "emc/errors.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace emc::io {

void write_f32_le(const std::filesystem::path& path, std::span<const double> values)
{
    std::vector<unsigned char> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
        bytes[4 * i + 0] = static_cast<unsigned char>(bits & 0xffu);
        bytes[4 * i + 1] = static_cast<unsigned char>((bits >> 8) & 0xffu);
        bytes[4 * i + 2] = static_cast<unsigned char>((bits >> 16) & 0xffu);
        bytes[4 * i + 3] = static_cast<unsigned char>((bits >> 24) & 0xffu);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("failed writing " + path.string());
}

std::vector<double> read_f32_le(const std::filesystem::path& path, std::size_t expected_count)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected_count * 4)
        throw ValidationError(path.string() + ": expected " + std::to_string(expected_count * 4) +
                              " bytes, found " + std::to_string(bytes.size()));
    std::vector<double> values(expected_count);
    for (std::size_t i = 0; i < expected_count; ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(bytes[4 * i]) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
        values[i] = std::bit_cast<float>(bits);
    }
    return values;
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& value)
{
    write_text(path, value.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw Error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require_file(const std::filesystem::path& path, const std::string& what)
{
    if (!std::filesystem::exists(path))
        throw ValidationError("missing " + path.string() + " (" + what + ")");
}

} // namespace emc::io
