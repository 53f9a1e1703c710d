#pragma once

#include "emc/geometry.hpp"
#include "emc/radon.hpp"

#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace emc {

struct EccConfig {
    double kappa_step = 0.1 * std::numbers::pi / 180.0;  ///< radians
    /// Half-width of the sampled pencil in radians. Unset: per pair, the angle
    /// beyond which the epipolar lines miss both detectors.
    std::optional<double> kappa_max;
    int pair_stride = 1;
    int threads = 1;

    /// Throws ValidationError on non-positive step/stride or kappa_max < kappa_step.
    void validate() const;
};

/// Multiplies every pixel by the cosine of the angle between its ray and the principal ray.
ProjectionImage cosine_weighted(const ProjectionImage& img, const ProjectionMatrix& P);

/// Cosine weighting followed by radon_derivative, one table per view.
std::vector<RadonDerivativeTable> prepare_tables(std::span<const ProjectionImage> images,
                                                 std::span<const ProjectionMatrix> Ps, int n_alpha, int n_t,
                                                 int threads = 1);

/// Sum over the epipolar pencil of the squared difference between the plane
/// derivatives seen by the two views. Each view's value is the Radon derivative
/// of its (cosine weighted) image at the epipolar line, divided by
/// 1 - (n . principal_ray)^2 so both views measure the same 3D quantity.
double pair_inconsistency(const ProjectionMatrix& P0, const ProjectionMatrix& P1, const RadonDerivativeTable& T0,
                          const RadonDerivativeTable& T1, const EccConfig& cfg);

/// Index pairs (i, j), i < j, with (j - i) divisible by `stride`, ascending.
std::vector<std::pair<int, int>> evaluation_pairs(int n, int stride);

/// Applies params[i] to Ps[i] and sums pair_inconsistency over evaluation_pairs.
/// The reduction runs in ascending pair order for any thread count.
double total_cost(std::span<const ProjectionMatrix> Ps, std::span<const RadonDerivativeTable> tables,
                  std::span<const RigidParams> params, const EccConfig& cfg);

/// Per-pair terms of total_cost in evaluation_pairs order.
std::vector<double> pair_costs(std::span<const ProjectionMatrix> Ps, std::span<const RadonDerivativeTable> tables,
                               std::span<const RigidParams> params, const EccConfig& cfg);

} // namespace emc
