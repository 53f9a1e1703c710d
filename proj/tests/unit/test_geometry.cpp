#include "emc/errors.hpp"
#include "emc/geometry.hpp"
#include "emc/simulation.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <numbers>
#include <random>

using namespace emc;

namespace {

constexpr double deg = std::numbers::pi / 180.0;

RigidParams random_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> t(-2.0, 2.0);
    std::uniform_real_distribution<double> r(-40.0, 40.0);
    return {t(rng), t(rng), t(rng), r(rng), r(rng), r(rng)};
}

// Null space from the SVD, independent of the cofactor formula used by source_position.
Eigen::Vector4d svd_null_space(const ProjectionMatrix& P)
{
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    A.topRows<3>() = P;
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
    Eigen::Vector4d c = svd.matrixV().col(3);
    return c / c(3);
}

} // namespace

TEST_CASE("source_position of a canonical camera")
{
    ProjectionMatrix P;
    P << 1, 0, 0, -1, 0, 1, 0, -2, 0, 0, 1, -3;
    const HomogeneousPoint C = source_position(P);
    CHECK(C(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(C(1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(C(2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(C(3) == 1.0);
}

TEST_CASE("source_position matches the SVD null space on the trajectory")
{
    ScanGeometry g;
    const auto Ps = short_scan_trajectory(g);
    const HomogeneousPoint C0 = source_position(Ps[0]);
    CHECK((C0.head<3>() - Eigen::Vector3d(g.source_isocenter_mm, 0.0, 0.0)).norm() < 1e-9);
    for (const auto& P : Ps) {
        const HomogeneousPoint C = source_position(P);
        CHECK((C - svd_null_space(P)).norm() < 1e-9);
        CHECK((P * C).norm() <= 1e-9 * P.norm() * C.norm());
        CHECK(C.head<3>().norm() == doctest::Approx(g.source_isocenter_mm).epsilon(1e-12));
    }
}

TEST_CASE("source_position rejects rank-deficient matrices")
{
    ProjectionMatrix P;
    P << 1, 2, 3, 4, 1, 2, 3, 4, 0, 0, 1, 1;
    CHECK_THROWS_AS(source_position(P), DegenerateMatrix);
}

TEST_CASE("compose_rigid basics")
{
    CHECK(compose_rigid({}).isApprox(Eigen::Matrix4d::Identity(), 0.0));
    const Eigen::Matrix4d T = compose_rigid({0, 0, 0, 90, 0, 0});
    const Eigen::Vector4d y = T * Eigen::Vector4d(0, 1, 0, 1);
    CHECK((y - Eigen::Vector4d(0, 0, 1, 1)).norm() < 1e-15);

    // Order: translation after Rz * Ry * Rx.
    const RigidParams p{1.0, -2.0, 0.5, 10.0, -20.0, 30.0};
    const Eigen::Matrix3d R = (Eigen::AngleAxisd(p.rz * deg, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(p.ry * deg, Eigen::Vector3d::UnitY()) *
                               Eigen::AngleAxisd(p.rx * deg, Eigen::Vector3d::UnitX()))
                                  .toRotationMatrix();
    const Eigen::Matrix4d Tp = compose_rigid(p);
    CHECK((Tp.topLeftCorner<3, 3>() - R).norm() < 1e-14);
    CHECK((Tp.topRightCorner<3, 1>() - Eigen::Vector3d(1.0, -2.0, 0.5)).norm() == 0.0);
}

TEST_CASE("rigid transforms: orthonormality, inverse and decomposition")
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        const RigidParams p = random_params(rng);
        const Eigen::Matrix4d T = compose_rigid(p);
        const Eigen::Matrix3d R = T.topLeftCorner<3, 3>();
        CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).norm() < 1e-12);
        CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((T * T.inverse() - Eigen::Matrix4d::Identity()).norm() < 1e-12);
        CHECK((compose_rigid(inverse_params(p)) - T.inverse()).norm() < 1e-12);
        const RigidParams q = decompose_rigid(T);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-10));
    }
}

TEST_CASE("apply_motion")
{
    ScanGeometry g;
    const ProjectionMatrix P = short_scan_trajectory(g)[7];
    CHECK(apply_motion(P, {}) == P);

    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const RigidParams p = random_params(rng);
        const ProjectionMatrix back = apply_motion(apply_motion(P, p), inverse_params(p));
        CHECK((back - P).norm() <= 1e-12 * P.norm());
    }

    // A tz shift moves the projected isocenter along the image of the world z-axis.
    const ProjectionMatrix Pm = apply_motion(P, {0, 0, 0.05, 0, 0, 0});
    const Eigen::Vector3d before = P * Eigen::Vector4d(0, 0, 0, 1);
    const Eigen::Vector3d after = Pm * Eigen::Vector4d(0, 0, 0, 1);
    const Eigen::Vector3d oracle = P * Eigen::Vector4d(0, 0, 0.05, 1);
    const Eigen::Vector2d a = after.head<2>() / after(2);
    const Eigen::Vector2d o = oracle.head<2>() / oracle(2);
    CHECK((a - o).norm() < 1e-12);
    CHECK(std::abs(a(0) - before(0) / before(2)) < 1e-12);  // stays in the central column
    CHECK(a(1) < before(1) / before(2));                    // rows run downward in z
}

TEST_CASE("epipolar_plane contains both sources")
{
    const HomogeneousPoint C0(-5.0, 0.0, 0.0, 1.0);
    const HomogeneousPoint C1(7.0, 0.0, 0.0, 1.0);
    const EpipolarPlane E0 = epipolar_plane(C0, C1, 0.0);
    CHECK(std::abs(std::abs(E0.e(2)) - 1.0) < 1e-15);
    CHECK(E0.e.head<2>().norm() < 1e-15);
    CHECK(std::abs(E0.e(3)) < 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::uniform_real_distribution<double> k(-std::numbers::pi, std::numbers::pi);
    for (int n = 0; n < 100; ++n) {
        const HomogeneousPoint A(u(rng), u(rng), u(rng), 1.0);
        const HomogeneousPoint B(u(rng), u(rng), u(rng), 1.0);
        const EpipolarPlane E = epipolar_plane(A, B, k(rng));
        CHECK(std::abs(E.e.dot(A)) <= 1e-9 * E.e.norm() * A.norm());
        CHECK(std::abs(E.e.dot(B)) <= 1e-9 * E.e.norm() * B.norm());
    }
    CHECK_THROWS_AS(epipolar_plane(C0, C0, 0.1), DegenerateBaseline);
    // Baseline along z falls back to the x-axis reference.
    CHECK_NOTHROW(epipolar_plane(HomogeneousPoint(0, 0, -1, 1), HomogeneousPoint(0, 0, 1, 1), 0.3));
}

TEST_CASE("plane_to_line incidence on sampled plane points")
{
    CHECK(oracle::epipolar_incidence_residual() <= 1e-6);
}

TEST_CASE("plane_to_line special cases")
{
    ProjectionMatrix P;
    P << 100, 0, 50, 0, 0, 100, 40, 0, 0, 0, 1, 0;  // principal point (50, 40)
    // Plane x = 0 contains the optical axis.
    EpipolarPlane E{HomogeneousPlane(1, 0, 0, 0), 0.0};
    const Line2D line = plane_to_line(P, E);
    CHECK(std::abs(line.l.dot(Eigen::Vector3d(50, 40, 1))) < 1e-12 * line.l.norm());
    // Hessian fields relative to the chosen origin.
    const Line2D centered = plane_to_line(P, E, Eigen::Vector2d(50, 40));
    CHECK(centered.t == doctest::Approx(0.0));
    // The principal plane z = 0 maps to the line at infinity.
    EpipolarPlane principal{HomogeneousPlane(0, 0, 1, 0), 0.0};
    CHECK_THROWS_AS(plane_to_line(P, principal), LineAtInfinity);
}

TEST_CASE("line_to_hessian")
{
    HessianLine h = line_to_hessian({1, 0, -5});
    CHECK(h.alpha == doctest::Approx(0.0));
    CHECK(h.t == doctest::Approx(5.0));
    h = line_to_hessian({0, 1, -3});
    CHECK(h.alpha == doctest::Approx(std::numbers::pi / 2));
    CHECK(h.t == doctest::Approx(3.0));
    const HomogeneousLine l(0.3, -0.8, 2.5);
    const HessianLine a = line_to_hessian(l);
    const HessianLine b = line_to_hessian(-4.0 * l);
    CHECK(a.alpha == b.alpha);
    CHECK(a.t == b.t);
    CHECK(a.alpha >= 0.0);
    CHECK(a.alpha < std::numbers::pi);
    // Reconstructed implicit line equals the input up to scale.
    const Eigen::Vector3d r(std::cos(a.alpha), std::sin(a.alpha), -a.t);
    CHECK(r.normalized().cross(l.normalized()).norm() < 1e-12);
    CHECK_THROWS_AS(line_to_hessian({0, 0, 1}), LineAtInfinity);

    const HessianLine o = oriented_hessian(-l);
    CHECK(std::cos(o.alpha) * 1.0 + std::sin(o.alpha) * 2.0 - o.t ==
          doctest::Approx((-l).dot(Eigen::Vector3d(1, 2, 1)) / l.head<2>().norm()));
}

TEST_CASE("normalize_projection")
{
    ScanGeometry g;
    const ProjectionMatrix P = -3.5 * short_scan_trajectory(g)[4];
    const ProjectionMatrix N = normalize_projection(P);
    CHECK(N.block<1, 3>(2, 0).norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(N.block<3, 3>(0, 0).determinant() > 0.0);
    const Eigen::Vector3d x = N * Eigen::Vector4d(0, 0, 0, 1);
    CHECK(x(2) == doctest::Approx(g.source_isocenter_mm).epsilon(1e-12));
}
