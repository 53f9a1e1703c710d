#pragma once

#include "emc/volume.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace emc {

struct GrayImage16 {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> pixels;  ///< row-major
};

struct SliceWindow {
    std::optional<double> level;  ///< center; slice midrange when unset
    std::optional<double> width;  ///< slice range when unset
};

/// Axial slice at z index round(center + offset * (nz - 1) / 2), mapped linearly
/// through the window onto [0, 65535].
GrayImage16 axial_slice(const Volume& v, double offset = 0.25, const SliceWindow& window = {});

/// Throws Error if the file cannot be written.
void write_png16(const std::filesystem::path& path, const GrayImage16& img);

} // namespace emc
