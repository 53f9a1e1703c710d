#pragma once

#include "emc/geometry.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace emc {

/// Which rigid parameters are free, in order (tx, ty, tz, rx, ry, rz).
struct ScenarioMask {
    std::array<bool, 6> active{};

    static ScenarioMask out_of_plane();  ///< tz, rx, ry
    static ScenarioMask in_plane();      ///< tx, ty, rz
    static ScenarioMask full();

    int count() const;
    bool operator==(const ScenarioMask&) const = default;
};

enum class Scenario { OutOfPlane, InPlane, Full };

/// Accepts "oop", "ip" or "full"; anything else is a ValidationError.
Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);
ScenarioMask mask_for(Scenario s);

/// Piecewise cubic Hermite interpolant with Akima slopes (M >= 5). Fewer nodes
/// fall back to linear (M = 2) or parabolic finite-difference slopes (M = 3, 4).
class AkimaSpline {
public:
    AkimaSpline(std::span<const double> xs, std::span<const double> ys);

    /// Throws OutOfDomain outside [xs.front(), xs.back()].
    double operator()(double q) const;

    std::span<const double> slopes() const { return slopes_; }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> slopes_;
};

double akima_eval(std::span<const double> xs, std::span<const double> ys, double q);

/// One Akima spline per rigid parameter over the projection index.
/// node_values rows are (tx, ty, tz) in mm and (rx, ry, rz) in degrees.
struct MotionSpline {
    std::vector<double> node_indices;
    std::array<std::vector<double>, 6> node_values;

    /// n_nodes nodes spread uniformly over [0, n_projections - 1], all values zero.
    static MotionSpline uniform(int n_nodes, int n_projections);

    int n_nodes() const { return static_cast<int>(node_indices.size()); }

    /// Throws if the nodes do not span exactly [0, n_projections - 1].
    void validate(int n_projections) const;
};

std::vector<RigidParams> expand(const MotionSpline& spline, int n_projections);

/// Active rows concatenated node-major within each row: [row0 nodes..., row1 nodes...].
std::vector<double> pack(const ScenarioMask& mask, const MotionSpline& spline);

/// Writes `values` into the active rows of `spline`; inactive rows are untouched.
void unpack(const ScenarioMask& mask, std::span<const double> values, MotionSpline& spline);

} // namespace emc
