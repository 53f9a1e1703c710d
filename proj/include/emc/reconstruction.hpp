#pragma once

#include "emc/geometry.hpp"
#include "emc/radon.hpp"
#include "emc/simulation.hpp"
#include "emc/volume.hpp"

#include <span>
#include <vector>

namespace emc {

enum class RampWindow { RamLak, Hann };

struct FdkOptions {
    RampWindow window = RampWindow::RamLak;
    int threads = 1;
};

/// Short-scan redundancy weight for source angle beta in [0, pi + 2 delta] and
/// fan angle gamma. The conjugate of (beta, gamma) is (beta + pi + 2 gamma, -gamma).
double parker_weight(double beta, double gamma, double delta);

/// Fan angle of detector column u for the nominal geometry, in the sign convention
/// parker_weight expects.
double column_fan_angle(const ScanGeometry& g, double u);

/// Cosine and Parker weighting followed by the row-wise ramp filter. The result is
/// expressed per unit length on the detector plane scaled to the isocenter.
ProjectionImage filter_projection(const ProjectionImage& img, const ScanGeometry& g, int view, RampWindow window);

/// Throws GridOutsideFov unless every corner of the grid projects onto the detector of every view.
void check_field_of_view(const Volume& grid, std::span<const ProjectionMatrix> Ps, int rows, int cols);

/// FDK reconstruction on the grid of `grid` (its data is ignored). Backprojection uses
/// the given matrices directly, so corrupted or recovered geometries plug in unchanged.
Volume fdk(std::span<const ProjectionImage> images, std::span<const ProjectionMatrix> Ps, const Volume& grid,
           const ScanGeometry& g, const FdkOptions& opts = {});

} // namespace emc
