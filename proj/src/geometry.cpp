#include "emc/geometry.hpp"

#include "emc/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double minor3(const ProjectionMatrix& P, int skip)
{
    Eigen::Matrix3d m;
    for (int c = 0, k = 0; c < 4; ++c) {
        if (c == skip)
            continue;
        m.col(k++) = P.col(c);
    }
    return m.determinant();
}

Eigen::Vector3d dehomogenize(const HomogeneousPoint& X)
{
    if (std::abs(X(3)) <= 1e-300)
        throw DegenerateBaseline("source position at infinity");
    return X.head<3>() / X(3);
}

} // namespace

double& RigidParams::operator[](std::size_t i)
{
    switch (i) {
    case 0: return tx;
    case 1: return ty;
    case 2: return tz;
    case 3: return rx;
    case 4: return ry;
    default: return rz;
    }
}

double RigidParams::operator[](std::size_t i) const
{
    return const_cast<RigidParams&>(*this)[i];
}

HomogeneousPoint source_position(const ProjectionMatrix& P)
{
    // Generalized cross product of the three rows.
    HomogeneousPoint C(minor3(P, 0), -minor3(P, 1), minor3(P, 2), -minor3(P, 3));
    const double scale = P.norm();
    if (!(C.norm() > 1e-12 * scale * scale * scale))
        throw DegenerateMatrix("projection matrix has rank < 3");
    if (std::abs(C(3)) > 1e-12 * C.norm())
        return C / C(3);
    return C.normalized();
}

Eigen::Matrix4d compose_rigid(const RigidParams& p)
{
    const Eigen::Matrix3d R =
        (Eigen::AngleAxisd(p.rz * kDegToRad, Eigen::Vector3d::UnitZ()) *
         Eigen::AngleAxisd(p.ry * kDegToRad, Eigen::Vector3d::UnitY()) *
         Eigen::AngleAxisd(p.rx * kDegToRad, Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    T.topLeftCorner<3, 3>() = R;
    T.topRightCorner<3, 1>() = Eigen::Vector3d(p.tx, p.ty, p.tz);
    return T;
}

RigidParams decompose_rigid(const Eigen::Matrix4d& T)
{
    const Eigen::Matrix3d R = T.topLeftCorner<3, 3>();
    RigidParams p;
    p.tx = T(0, 3);
    p.ty = T(1, 3);
    p.tz = T(2, 3);
    p.ry = std::asin(std::clamp(-R(2, 0), -1.0, 1.0)) * kRadToDeg;
    p.rx = std::atan2(R(2, 1), R(2, 2)) * kRadToDeg;
    p.rz = std::atan2(R(1, 0), R(0, 0)) * kRadToDeg;
    return p;
}

RigidParams inverse_params(const RigidParams& p)
{
    const Eigen::Matrix4d T = compose_rigid(p);
    Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
    const Eigen::Matrix3d Rt = T.topLeftCorner<3, 3>().transpose();
    inv.topLeftCorner<3, 3>() = Rt;
    inv.topRightCorner<3, 1>() = -Rt * T.topRightCorner<3, 1>();
    return decompose_rigid(inv);
}

ProjectionMatrix apply_motion(const ProjectionMatrix& P, const RigidParams& p)
{
    if (p == RigidParams{})
        return P;
    return P * compose_rigid(p);
}

ProjectionMatrix normalize_projection(const ProjectionMatrix& P)
{
    const double n = P.block<1, 3>(2, 0).norm();
    if (!(n > 0.0))
        throw DegenerateMatrix("projection matrix has a zero principal row");
    const double sign = P.block<3, 3>(0, 0).determinant() < 0.0 ? -1.0 : 1.0;
    return P * (sign / n);
}

HomogeneousPlane PlanePencil::at(double kappa) const
{
    return std::cos(kappa) * ref + std::sin(kappa) * orth;
}

PlanePencil epipolar_pencil(const HomogeneousPoint& C0, const HomogeneousPoint& C1)
{
    const Eigen::Vector3d c0 = dehomogenize(C0);
    const Eigen::Vector3d c1 = dehomogenize(C1);
    const Eigen::Vector3d b = c1 - c0;
    if (b.norm() < 1e-9)
        throw DegenerateBaseline("source positions coincide");
    const Eigen::Vector3d bn = b.normalized();

    Eigen::Vector3d u = Eigen::Vector3d::UnitZ() - bn.z() * bn;
    if (u.norm() < 1e-6)
        u = Eigen::Vector3d::UnitX() - bn.x() * bn;
    u.normalize();
    const Eigen::Vector3d v = bn.cross(u);

    PlanePencil pencil;
    pencil.ref << u, -u.dot(c0);
    pencil.orth << v, -v.dot(c0);
    pencil.baseline = bn;
    return pencil;
}

EpipolarPlane epipolar_plane(const HomogeneousPoint& C0, const HomogeneousPoint& C1, double kappa)
{
    return {epipolar_pencil(C0, C1).at(kappa), kappa};
}

Eigen::Matrix<double, 3, 4> plane_to_line_map(const ProjectionMatrix& P)
{
    const Eigen::Matrix3d PPt = P * P.transpose();
    return PPt.inverse() * P;
}

Line2D plane_to_line(const ProjectionMatrix& P, const EpipolarPlane& E, const Eigen::Vector2d& origin)
{
    Line2D line;
    line.l = plane_to_line_map(P) * E.e;
    const HessianLine h = line_to_hessian(shift_origin(line.l, origin));
    line.alpha = h.alpha;
    line.t = h.t;
    return line;
}

HomogeneousLine shift_origin(const HomogeneousLine& l, const Eigen::Vector2d& origin)
{
    return {l(0), l(1), l(2) + l(0) * origin(0) + l(1) * origin(1)};
}

HessianLine oriented_hessian(const HomogeneousLine& l)
{
    const double s = std::hypot(l(0), l(1));
    if (!(s > 1e-12 * l.norm()))
        throw LineAtInfinity("line at infinity has no Hessian form");
    return {std::atan2(l(1), l(0)), -l(2) / s};
}

HessianLine line_to_hessian(const HomogeneousLine& l)
{
    HessianLine h = oriented_hessian(l);
    if (h.alpha < 0.0) {
        h.alpha += std::numbers::pi;
        h.t = -h.t;
    }
    if (h.alpha >= std::numbers::pi) {
        h.alpha -= std::numbers::pi;
        h.t = -h.t;
    }
    return h;
}

} // namespace emc
