#include "emc/volume.hpp"

#include "emc/errors.hpp"
#include "emc/io.hpp"

namespace emc {

Volume Volume::centered(int n, double spacing)
{
    return centered(n, n, n, spacing);
}

Volume Volume::centered(int nx, int ny, int nz, double spacing)
{
    if (nx <= 0 || ny <= 0 || nz <= 0 || !(spacing > 0.0))
        throw ValidationError("volume grid needs positive sizes and spacing");
    Volume v;
    v.nx = nx;
    v.ny = ny;
    v.nz = nz;
    v.spacing = spacing;
    v.origin = -0.5 * spacing * Eigen::Vector3d(nx - 1, ny - 1, nz - 1);
    v.data.assign(static_cast<std::size_t>(nx) * ny * nz, 0.0);
    return v;
}

void save_volume(const Volume& v, const std::filesystem::path& base)
{
    io::json meta = {
        {"nx", v.nx},
        {"ny", v.ny},
        {"nz", v.nz},
        {"spacing_mm", v.spacing},
        {"origin_mm", {v.origin.x(), v.origin.y(), v.origin.z()}},
        {"dtype", "float32-le"},
        {"order", "x-fastest"},
    };
    io::write_json(std::filesystem::path(base).concat(".json"), meta);
    io::write_f32_le(std::filesystem::path(base).concat(".raw"), v.data);
}

Volume load_volume(const std::filesystem::path& base)
{
    const auto meta_path = std::filesystem::path(base).concat(".json");
    const io::json meta = io::read_json(meta_path);
    Volume v;
    try {
        v.nx = meta.at("nx").get<int>();
        v.ny = meta.at("ny").get<int>();
        v.nz = meta.at("nz").get<int>();
        v.spacing = meta.at("spacing_mm").get<double>();
        const auto& o = meta.at("origin_mm");
        v.origin = Eigen::Vector3d(o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>());
    } catch (const io::json::exception& e) {
        throw ValidationError(meta_path.string() + ": " + e.what());
    }
    if (v.nx <= 0 || v.ny <= 0 || v.nz <= 0 || !(v.spacing > 0.0))
        throw ValidationError(meta_path.string() + ": invalid grid");
    v.data = io::read_f32_le(std::filesystem::path(base).concat(".raw"),
                             static_cast<std::size_t>(v.nx) * v.ny * v.nz);
    return v;
}

} // namespace emc
