#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <vector>

namespace emc {

/// Regular voxel grid, x fastest. `origin` is the center of voxel (0, 0, 0) in mm.
struct Volume {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    double spacing = 1.0;
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    std::vector<double> data;

    /// n^3 grid of the given spacing centered on the world origin, zero filled.
    static Volume centered(int n, double spacing);
    static Volume centered(int nx, int ny, int nz, double spacing);

    std::size_t size() const { return data.size(); }
    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(k) * ny + static_cast<std::size_t>(j)) * nx + static_cast<std::size_t>(i);
    }
    double& at(int i, int j, int k) { return data[index(i, j, k)]; }
    double at(int i, int j, int k) const { return data[index(i, j, k)]; }
    Eigen::Vector3d position(int i, int j, int k) const
    {
        return origin + spacing * Eigen::Vector3d(i, j, k);
    }
    bool same_shape(const Volume& other) const
    {
        return nx == other.nx && ny == other.ny && nz == other.nz;
    }
};

/// `<base>.raw` (little-endian float32) + `<base>.json` sidecar.
void save_volume(const Volume& v, const std::filesystem::path& base);
Volume load_volume(const std::filesystem::path& base);

} // namespace emc
