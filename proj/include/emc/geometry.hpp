#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>

namespace emc {

/// 3x4 projection matrix mapping homogeneous world points (mm) to homogeneous
/// detector pixels. Pixel (u, v) = (column, row), pixel centers at integers.
using ProjectionMatrix = Eigen::Matrix<double, 3, 4, Eigen::RowMajor>;
using HomogeneousPoint = Eigen::Vector4d;
using HomogeneousPlane = Eigen::Vector4d;
using HomogeneousLine = Eigen::Vector3d;

/// Six rigid-body parameters. Translations in millimeters, rotations in degrees.
struct RigidParams {
    double tx = 0.0;
    double ty = 0.0;
    double tz = 0.0;
    double rx = 0.0;
    double ry = 0.0;
    double rz = 0.0;

    static constexpr std::size_t size() { return 6; }

    double& operator[](std::size_t i);
    double operator[](std::size_t i) const;

    bool operator==(const RigidParams&) const = default;
};

/// Plane of the epipolar pencil. `e` has a unit normal in its first three
/// components; `kappa` is the rotation about the baseline in radians.
struct EpipolarPlane {
    HomogeneousPlane e;
    double kappa = 0.0;
};

/// Hessian normal form cos(alpha) x + sin(alpha) y = t.
struct HessianLine {
    double alpha = 0.0;
    double t = 0.0;
};

/// Detector line: homogeneous coefficients plus the Hessian form relative to
/// a chosen image origin.
struct Line2D {
    HomogeneousLine l;
    double alpha = 0.0;
    double t = 0.0;
};

/// Null space of P, dehomogenized when finite. Throws DegenerateMatrix if rank < 3.
HomogeneousPoint source_position(const ProjectionMatrix& P);

/// Trans(tx,ty,tz) * Rz(rz) * Ry(ry) * Rx(rx).
Eigen::Matrix4d compose_rigid(const RigidParams& p);

/// Inverse of compose_rigid for a proper rigid transform (ZYX Euler angles).
RigidParams decompose_rigid(const Eigen::Matrix4d& T);

/// Parameters q with compose_rigid(q) == compose_rigid(p)^-1.
RigidParams inverse_params(const RigidParams& p);

/// P * compose_rigid(p).
ProjectionMatrix apply_motion(const ProjectionMatrix& P, const RigidParams& p);

/// Scales P so that the principal ray row has unit length and det of the left
/// 3x3 block is positive; points in front of the source then have positive depth.
ProjectionMatrix normalize_projection(const ProjectionMatrix& P);

/// Plane pencil about the baseline C0-C1: E(kappa) = cos(kappa) ref + sin(kappa) orth.
/// The kappa = 0 plane has the world z-axis (projected orthogonally to the
/// baseline) as its normal; for a baseline parallel to z the x-axis is used.
struct PlanePencil {
    HomogeneousPlane ref;
    HomogeneousPlane orth;
    Eigen::Vector3d baseline;  ///< unit vector from C0 to C1

    HomogeneousPlane at(double kappa) const;
};

PlanePencil epipolar_pencil(const HomogeneousPoint& C0, const HomogeneousPoint& C1);
EpipolarPlane epipolar_plane(const HomogeneousPoint& C0, const HomogeneousPoint& C1, double kappa);

/// Pseudo-inverse transpose of P; maps planes through the source to image lines.
Eigen::Matrix<double, 3, 4> plane_to_line_map(const ProjectionMatrix& P);

/// Image of plane E under P. The Hessian fields are relative to `origin`
/// (pixel coordinates of the image origin).
Line2D plane_to_line(const ProjectionMatrix& P, const EpipolarPlane& E,
                     const Eigen::Vector2d& origin = Eigen::Vector2d::Zero());

/// alpha in [0, pi), t signed. Throws LineAtInfinity.
HessianLine line_to_hessian(const HomogeneousLine& l);

/// Same as line_to_hessian but keeps the orientation of l: alpha in (-pi, pi].
/// The direction (cos alpha, sin alpha) is the one in which l . (x, y, 1) grows.
HessianLine oriented_hessian(const HomogeneousLine& l);

/// Re-expresses l in coordinates whose origin sits at `origin`.
HomogeneousLine shift_origin(const HomogeneousLine& l, const Eigen::Vector2d& origin);

} // namespace emc
