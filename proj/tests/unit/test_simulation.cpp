#include "emc/errors.hpp"
#include "emc/simulation.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace emc;

namespace {

ProjectionImage render(const Phantom& ph, const ScanGeometry& g, double beta, int ss = 1)
{
    return forward_project(ph, view_matrix(g, beta), g.detector_rows, g.detector_cols, g.pixel_pitch_mm, ss);
}

} // namespace

TEST_CASE("central ray through a sphere equals the diameter times the density")
{
    ScanGeometry g;
    g.detector_cols = 95;
    g.detector_rows = 63;
    const Phantom ph = make_phantom("single-sphere");
    for (double beta : {0.0, 0.7, 2.9}) {
        const ProjectionImage img = render(ph, g, beta);
        CHECK(std::abs(img.at(47, 31) - 8.0) <= 1e-9);
    }
}

TEST_CASE("analytic projector matches fine quadrature")
{
    CHECK(oracle::projector_error() <= 1e-4);
}

TEST_CASE("isocenter, source circle and z-axis")
{
    const ScanGeometry g;
    for (const auto& P : short_scan_trajectory(g)) {
        const Eigen::Vector3d iso = P * Eigen::Vector4d(0, 0, 0, 1);
        CHECK(iso(0) / iso(2) == doctest::Approx(0.5 * (g.detector_cols - 1)).epsilon(1e-12));
        CHECK(iso(1) / iso(2) == doctest::Approx(0.5 * (g.detector_rows - 1)).epsilon(1e-12));
        const Eigen::Vector4d C = source_position(P);
        CHECK(std::abs(C(2)) < 1e-9);
        CHECK(C.head<3>().norm() == doctest::Approx(g.source_isocenter_mm).epsilon(1e-12));
        for (double z : {-5.0, 3.0}) {
            const Eigen::Vector3d p = P * Eigen::Vector4d(0, 0, z, 1);
            CHECK(p(0) / p(2) == doctest::Approx(0.5 * (g.detector_cols - 1)).epsilon(1e-12));
            CHECK((p(1) / p(2) > 0.5 * (g.detector_rows - 1)) == (z < 0.0));
        }
    }
}

TEST_CASE("view angles span the range with both ends")
{
    const ScanGeometry g;
    CHECK(g.view_angle(0) == 0.0);
    CHECK(g.view_angle(g.n_projections - 1) == doctest::Approx(g.angular_range_deg * std::acos(-1.0) / 180.0));
}

TEST_CASE("short-scan condition is enforced")
{
    ScanGeometry g;
    CHECK_NOTHROW(g.validate());
    g.angular_range_deg = 180.0 + g.fan_angle_deg() - 0.5;
    CHECK_THROWS_AS(short_scan_trajectory(g), InvalidGeometry);
    g.angular_range_deg = 360.0;
    CHECK_THROWS_AS(g.validate(), InvalidGeometry);
    g = ScanGeometry{};
    g.source_detector_mm = 50.0;
    CHECK_THROWS_AS(g.validate(), InvalidGeometry);
}

TEST_CASE("phantom presets")
{
    CHECK(make_phantom("single-sphere").components.size() == 1);
    CHECK(make_phantom("two-spheres").components.size() == 2);
    const Phantom tibia = make_phantom("tibia-like");
    CHECK(tibia.density_at({0, 0, 0}) == doctest::Approx(0.3));
    CHECK(tibia.density_at({4.0, 0, 0}) == doctest::Approx(1.0));
    CHECK(tibia.density_at({6.0, 0, 0}) == 0.0);
    CHECK_THROWS_AS(make_phantom("femur"), UnknownPreset);
}

TEST_CASE("projection is linear in the phantom")
{
    const ScanGeometry g;
    const Phantom a = make_phantom("two-spheres");
    const Phantom b = make_phantom("tibia-like");
    Phantom sum = a;
    for (Ellipsoid e : b.components) {
        e.density *= 2.5;
        sum.components.push_back(e);
    }
    const ProjectionImage ia = render(a, g, 0.4);
    const ProjectionImage ib = render(b, g, 0.4);
    const ProjectionImage is = render(sum, g, 0.4);
    for (std::size_t k = 0; k < is.data.size(); ++k)
        CHECK(std::abs(is.data[k] - (ia.data[k] + 2.5 * ib.data[k])) <= 1e-12 * (1.0 + std::abs(is.data[k])));
}

TEST_CASE("supersampling averages sub-pixel rays")
{
    ScanGeometry g;
    g.detector_cols = 16;
    g.detector_rows = 8;
    const Phantom ph = make_phantom("single-sphere");
    const ProjectionMatrix P = view_matrix(g, 0.3);
    const ProjectionImage coarse = forward_project(ph, P, 8, 16, g.pixel_pitch_mm, 2);
    // A 2x supersampled pixel is the mean of four pixels of a detector with half the pitch.
    ScanGeometry fine_g = g;
    fine_g.detector_cols = 32;
    fine_g.detector_rows = 16;
    fine_g.pixel_pitch_mm = 0.5 * g.pixel_pitch_mm;
    const ProjectionImage fine =
        forward_project(ph, view_matrix(fine_g, 0.3), 16, 32, fine_g.pixel_pitch_mm, 1);
    for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 16; ++u) {
            const double mean = 0.25 * (fine.at(2 * u, 2 * v) + fine.at(2 * u + 1, 2 * v) +
                                        fine.at(2 * u, 2 * v + 1) + fine.at(2 * u + 1, 2 * v + 1));
            CHECK(coarse.at(u, v) == doctest::Approx(mean).epsilon(1e-12));
        }
    CHECK_THROWS_AS(forward_project(ph, P, 8, 16, g.pixel_pitch_mm, 0), ValidationError);
}

TEST_CASE("inject_motion with a zero spline is the identity")
{
    const ScanGeometry g;
    const auto Ps = short_scan_trajectory(g);
    const MotionSpline zero = MotionSpline::uniform(9, g.n_projections);
    const auto moved = inject_motion(Ps, zero);
    for (std::size_t i = 0; i < Ps.size(); ++i)
        CHECK((moved[i] - Ps[i]).norm() <= 1e-12 * Ps[i].norm());
}

TEST_CASE("inject_motion applies the expanded parameters per view")
{
    const ScanGeometry g;
    const auto Ps = short_scan_trajectory(g);
    const MotionSpline s = random_motion_spline(g.n_projections, 9, mask_for(Scenario::Full), 0.05, 1.0, 3);
    const auto moved = inject_motion(Ps, s);
    const auto params = expand(s, g.n_projections);
    for (std::size_t i = 0; i < Ps.size(); ++i) {
        const ProjectionMatrix back = apply_motion(moved[i], inverse_params(params[i]));
        CHECK((back - Ps[i]).norm() <= 1e-9 * Ps[i].norm());
    }
}

TEST_CASE("random_motion_spline respects mask, amplitude and seed")
{
    const MotionSpline full = random_motion_spline(60, 9, mask_for(Scenario::Full), 0.05, 1.0, 42);
    const MotionSpline oop = random_motion_spline(60, 9, mask_for(Scenario::OutOfPlane), 0.05, 1.0, 42);
    const MotionSpline again = random_motion_spline(60, 9, mask_for(Scenario::Full), 0.05, 1.0, 42);
    const ScenarioMask m = mask_for(Scenario::OutOfPlane);
    for (std::size_t r = 0; r < 6; ++r) {
        CHECK(full.node_values[r] == again.node_values[r]);
        for (std::size_t k = 0; k < 9; ++k) {
            CHECK(std::abs(full.node_values[r][k]) <= (r < 3 ? 0.05 : 1.0));
            CHECK(oop.node_values[r][k] == (m.active[r] ? full.node_values[r][k] : 0.0));
        }
    }
    const MotionSpline other = random_motion_spline(60, 9, mask_for(Scenario::Full), 0.05, 1.0, 43);
    CHECK(other.node_values[0] != full.node_values[0]);
}

TEST_CASE("voxelize samples the density")
{
    const Phantom ph = make_phantom("single-sphere");
    const Volume grid = Volume::centered(9, 9, 9, 1.0);
    const Volume v = voxelize(ph, grid, 1);
    CHECK(v.at(4, 4, 4) == 1.0);
    CHECK(v.at(0, 0, 0) == 0.0);
    const Volume vs = voxelize(ph, grid, 4);
    CHECK(vs.at(4, 4, 4) == 1.0);
    CHECK(vs.at(8, 4, 4) > 0.0);
    CHECK(vs.at(8, 4, 4) < 1.0);
}
