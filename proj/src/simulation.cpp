#include "emc/simulation.hpp"

#include "emc/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace emc {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Ellipsoid sphere(const Eigen::Vector3d& c, double r, double density)
{
    Ellipsoid e;
    e.center = c;
    e.semi_axes = Eigen::Vector3d::Constant(r);
    e.density = density;
    return e;
}

} // namespace

bool Ellipsoid::contains(const Eigen::Vector3d& x) const
{
    const Eigen::Vector3d p = (rotation.transpose() * (x - center)).cwiseQuotient(semi_axes);
    return p.squaredNorm() <= 1.0;
}

double Ellipsoid::chord_length(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const
{
    // Map to the unit sphere: |p + s q|^2 = 1.
    const Eigen::Vector3d p = (rotation.transpose() * (origin - center)).cwiseQuotient(semi_axes);
    const Eigen::Vector3d q = (rotation.transpose() * dir).cwiseQuotient(semi_axes);
    const double a = q.squaredNorm();
    const double b = p.dot(q);
    const double c = p.squaredNorm() - 1.0;
    const double disc = b * b - a * c;
    if (disc <= 0.0)
        return 0.0;
    return 2.0 * std::sqrt(disc) / a;
}

double Phantom::density_at(const Eigen::Vector3d& x) const
{
    double d = 0.0;
    for (const Ellipsoid& e : components)
        if (e.contains(x))
            d += e.density;
    return d;
}

double Phantom::ray_integral(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const
{
    double sum = 0.0;
    for (const Ellipsoid& e : components)
        sum += e.density * e.chord_length(origin, dir);
    return sum;
}

Phantom make_phantom(std::string_view preset)
{
    Phantom ph;
    if (preset == "single-sphere") {
        ph.components.push_back(sphere(Eigen::Vector3d::Zero(), 4.0, 1.0));
    } else if (preset == "two-spheres") {
        ph.components.push_back(sphere({-3.0, 0.0, 0.0}, 2.5, 1.0));
        ph.components.push_back(sphere({3.0, 1.0, 1.0}, 2.0, 0.5));
    } else if (preset == "tibia-like") {
        // Cortical shell around a marrow lumen, slightly elliptic in x/y.
        Ellipsoid shell;
        shell.semi_axes = {4.5, 4.0, 7.5};
        shell.density = 1.0;
        Ellipsoid lumen;
        lumen.semi_axes = {3.3, 2.9, 7.0};
        lumen.density = -0.7;
        ph.components.push_back(shell);
        ph.components.push_back(lumen);
        // Eight small "trabecular" inclusions on a helix inside the lumen.
        for (int k = 0; k < 8; ++k) {
            const double phi = (45.0 * k + 20.0) * kDeg;
            const double z = -4.5 + 9.0 * k / 7.0;
            ph.components.push_back(sphere({1.5 * std::cos(phi), 1.5 * std::sin(phi), z}, 0.45, 0.5));
        }
    } else {
        throw UnknownPreset("unknown phantom preset '" + std::string(preset) +
                            "', expected one of {tibia-like, single-sphere, two-spheres}");
    }
    return ph;
}

double ScanGeometry::fan_angle_deg() const
{
    const double half_width = 0.5 * detector_cols * pixel_pitch_mm;
    return 2.0 * std::atan(half_width / source_detector_mm) / kDeg;
}

double ScanGeometry::view_angle(int i) const
{
    return angular_range_deg * kDeg * i / (n_projections - 1);
}

void ScanGeometry::validate() const
{
    if (n_projections < 2)
        throw InvalidGeometry("need at least two projections");
    if (!(source_isocenter_mm > 0.0) || !(source_detector_mm > source_isocenter_mm))
        throw InvalidGeometry("distances must satisfy 0 < source-isocenter < source-detector");
    if (detector_rows < 1 || detector_cols < 1 || !(pixel_pitch_mm > 0.0))
        throw InvalidGeometry("detector needs positive size and pixel pitch");
    if (!(angular_range_deg > 180.0 && angular_range_deg < 360.0))
        throw InvalidGeometry("short scan range must lie in (180, 360) degrees");
    if (angular_range_deg < 180.0 + fan_angle_deg())
        throw InvalidGeometry("short scan range " + std::to_string(angular_range_deg) +
                              " deg is below 180 deg + fan angle " + std::to_string(fan_angle_deg()) + " deg");
}

ProjectionMatrix view_matrix(const ScanGeometry& g, double beta)
{
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    Eigen::Matrix3d R;
    R << -s, c, 0.0,    // detector columns follow the source motion
        0.0, 0.0, -1.0,  // rows run downward in z
        -c, -s, 0.0;     // principal ray toward the isocenter
    const Eigen::Vector3d source = g.source_isocenter_mm * Eigen::Vector3d(c, s, 0.0);

    Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
    K(0, 0) = K(1, 1) = g.focal_length_px();
    K(0, 2) = 0.5 * (g.detector_cols - 1);
    K(1, 2) = 0.5 * (g.detector_rows - 1);

    Eigen::Matrix<double, 3, 4> Rt;
    Rt << R, -R * source;
    return K * Rt;
}

std::vector<ProjectionMatrix> short_scan_trajectory(const ScanGeometry& g)
{
    g.validate();
    std::vector<ProjectionMatrix> Ps;
    Ps.reserve(static_cast<std::size_t>(g.n_projections));
    for (int i = 0; i < g.n_projections; ++i)
        Ps.push_back(view_matrix(g, g.view_angle(i)));
    return Ps;
}

ProjectionImage forward_project(const Phantom& ph, const ProjectionMatrix& P, int rows, int cols, double pitch,
                                int supersample)
{
    if (supersample < 1)
        throw ValidationError("detector supersample factor must be at least 1");
    const ProjectionMatrix Pn = normalize_projection(P);
    const Eigen::Vector3d source = source_position(Pn).head<3>();
    const Eigen::Matrix3d Minv = Pn.block<3, 3>(0, 0).inverse();
    std::vector<double> offsets(static_cast<std::size_t>(supersample));
    for (int k = 0; k < supersample; ++k)
        offsets[static_cast<std::size_t>(k)] = (k + 0.5) / supersample - 0.5;
    const double inv_count = 1.0 / (static_cast<double>(supersample) * supersample);
    ProjectionImage img(cols, rows, pitch);
    for (int v = 0; v < rows; ++v)
        for (int u = 0; u < cols; ++u) {
            if (supersample == 1) {
                const Eigen::Vector3d dir = (Minv * Eigen::Vector3d(u, v, 1.0)).normalized();
                img.at(u, v) = ph.ray_integral(source, dir);
                continue;
            }
            double sum = 0.0;
            for (double dv : offsets)
                for (double du : offsets) {
                    const Eigen::Vector3d dir = (Minv * Eigen::Vector3d(u + du, v + dv, 1.0)).normalized();
                    sum += ph.ray_integral(source, dir);
                }
            img.at(u, v) = sum * inv_count;
        }
    return img;
}

std::vector<ProjectionMatrix> inject_motion(std::span<const ProjectionMatrix> Ps, const MotionSpline& spline)
{
    const auto params = expand(spline, static_cast<int>(Ps.size()));
    std::vector<ProjectionMatrix> out;
    out.reserve(Ps.size());
    for (std::size_t i = 0; i < Ps.size(); ++i)
        out.push_back(apply_motion(Ps[i], params[i]));
    return out;
}

MotionSpline random_motion_spline(int n_projections, int n_nodes, const ScenarioMask& mask,
                                  double amp_translation_mm, double amp_rotation_deg, std::uint64_t seed)
{
    MotionSpline spline = MotionSpline::uniform(n_nodes, n_projections);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t r = 0; r < 6; ++r) {
        const double amp = r < 3 ? amp_translation_mm : amp_rotation_deg;
        for (auto& v : spline.node_values[r]) {
            const double draw = unit(rng);
            v = mask.active[r] ? amp * draw : 0.0;
        }
    }
    return spline;
}

Volume voxelize(const Phantom& ph, const Volume& grid, int supersample)
{
    Volume out = grid;
    const int s = std::max(1, supersample);
    const double inv = 1.0 / (static_cast<double>(s) * s * s);
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const Eigen::Vector3d c = grid.position(i, j, k);
                double sum = 0.0;
                for (int a = 0; a < s; ++a)
                    for (int b = 0; b < s; ++b)
                        for (int d = 0; d < s; ++d) {
                            const Eigen::Vector3d off((a + 0.5) / s - 0.5, (b + 0.5) / s - 0.5, (d + 0.5) / s - 0.5);
                            sum += ph.density_at(c + grid.spacing * off);
                        }
                out.at(i, j, k) = sum * inv;
            }
    return out;
}

} // namespace emc
