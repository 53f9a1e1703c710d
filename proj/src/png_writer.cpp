#include "emc/png_writer.hpp"

#include "emc/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace emc {

GrayImage16 axial_slice(const Volume& v, double offset, const SliceWindow& window)
{
    if (v.nx <= 0 || v.ny <= 0 || v.nz <= 0)
        throw ValidationError("cannot render a slice of an empty volume");
    const double center = 0.5 * (v.nz - 1);
    const int k = std::clamp(static_cast<int>(std::lround(center + offset * center)), 0, v.nz - 1);
    const auto first = v.data.begin() + static_cast<std::ptrdiff_t>(v.index(0, 0, k));
    const auto last = first + static_cast<std::ptrdiff_t>(v.nx) * v.ny;
    const auto [lo_it, hi_it] = std::minmax_element(first, last);
    const double level = window.level.value_or(0.5 * (*lo_it + *hi_it));
    const double width = window.width.value_or(*hi_it - *lo_it);
    const double lo = level - 0.5 * width;

    GrayImage16 img;
    img.width = v.nx;
    img.height = v.ny;
    img.pixels.resize(static_cast<std::size_t>(v.nx) * v.ny);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const double x = width > 0.0 ? (first[static_cast<std::ptrdiff_t>(i)] - lo) / width : 0.0;
        img.pixels[i] = static_cast<std::uint16_t>(std::lround(65535.0 * std::clamp(x, 0.0, 1.0)));
    }
    return img;
}

void write_png16(const std::filesystem::path& path, const GrayImage16& img)
{
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp)
        throw Error("cannot open " + path.string() + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialisation failed");
    }
    std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 2);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("failed to write " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint16_t p = img.pixels[static_cast<std::size_t>(y) * img.width + x];
            row[static_cast<std::size_t>(2 * x)] = static_cast<png_byte>(p >> 8);
            row[static_cast<std::size_t>(2 * x + 1)] = static_cast<png_byte>(p & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace emc
