#pragma once

#include "emc/geometry.hpp"
#include "emc/motion_model.hpp"
#include "emc/radon.hpp"
#include "emc/volume.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace emc {

struct Ellipsoid {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();     ///< mm
    Eigen::Vector3d semi_axes = Eigen::Vector3d::Ones();  ///< mm
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  ///< body to world
    double density = 1.0;  ///< negative values carve out material

    bool contains(const Eigen::Vector3d& x) const;
    /// Length of the chord cut by the infinite line origin + s * dir (dir unit length).
    double chord_length(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const;
};

struct Phantom {
    std::vector<Ellipsoid> components;

    double density_at(const Eigen::Vector3d& x) const;
    /// Exact line integral of the density along origin + s * dir, dir unit length.
    double ray_integral(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const;
};

/// Presets: "tibia-like", "single-sphere", "two-spheres". Throws UnknownPreset.
Phantom make_phantom(std::string_view preset);

/// Circular cone-beam scan in the z = 0 plane with a flat detector.
struct ScanGeometry {
    int n_projections = 60;
    double angular_range_deg = 210.0;
    double source_isocenter_mm = 60.0;
    double source_detector_mm = 100.0;
    int detector_rows = 64;
    int detector_cols = 96;
    double pixel_pitch_mm = 0.5;

    double fan_angle_deg() const;
    double focal_length_px() const { return source_detector_mm / pixel_pitch_mm; }
    /// Source angle of view i in radians; views are equally spaced over the range, ends included.
    double view_angle(int i) const;
    /// Throws InvalidGeometry (including the short-scan condition range >= 180 deg + fan angle).
    void validate() const;
};

/// Projection matrix for a source at angle beta (radians). The isocenter maps to
/// the detector center and the world z-axis to the central detector column.
ProjectionMatrix view_matrix(const ScanGeometry& g, double beta);

std::vector<ProjectionMatrix> short_scan_trajectory(const ScanGeometry& g);

/// Analytic line integrals through every pixel center. With supersample > 1 each
/// pixel is the mean over a supersample x supersample grid of rays across its area.
ProjectionImage forward_project(const Phantom& ph, const ProjectionMatrix& P, int rows, int cols, double pitch,
                                int supersample = 1);

/// P_i -> P_i * T_i with T_i from the expanded spline. Images are not re-rendered.
std::vector<ProjectionMatrix> inject_motion(std::span<const ProjectionMatrix> Ps, const MotionSpline& spline);

/// Node values drawn uniformly from [-amp, amp] per active row; inactive rows are zero.
/// All six rows are always drawn so the same seed yields the same motion per parameter
/// regardless of the mask.
MotionSpline random_motion_spline(int n_projections, int n_nodes, const ScenarioMask& mask,
                                  double amp_translation_mm, double amp_rotation_deg, std::uint64_t seed);

/// Point samples of the phantom density, averaged over supersample^3 sub-voxel points.
Volume voxelize(const Phantom& ph, const Volume& grid, int supersample = 1);

} // namespace emc
