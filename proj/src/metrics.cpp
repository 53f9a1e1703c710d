#include "emc/metrics.hpp"

#include "emc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace emc {

namespace {

void require_same_shape(const Volume& a, const Volume& b)
{
    if (!a.same_shape(b) || a.data.size() != b.data.size())
        throw ShapeMismatch("volume shapes differ: " + std::to_string(a.nx) + "x" + std::to_string(a.ny) + "x" +
                            std::to_string(a.nz) + " vs " + std::to_string(b.nx) + "x" + std::to_string(b.ny) + "x" +
                            std::to_string(b.nz));
}

// Sums over every contained window of `w` samples along one axis. `src` has
// extents n[0..2]; the result shrinks along `axis` to n[axis] - w + 1.
std::vector<double> window_sums(const std::vector<double>& src, std::array<int, 3>& n, int axis, int w)
{
    std::array<int, 3> m = n;
    m[static_cast<std::size_t>(axis)] = n[static_cast<std::size_t>(axis)] - w + 1;
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? static_cast<std::size_t>(n[0])
                                                         : static_cast<std::size_t>(n[0]) * n[1];
    std::vector<double> out(static_cast<std::size_t>(m[0]) * m[1] * m[2]);
    std::size_t o = 0;
    for (int k = 0; k < m[2]; ++k)
        for (int j = 0; j < m[1]; ++j)
            for (int i = 0; i < m[0]; ++i) {
                const std::size_t base = (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
                double s = 0.0;
                for (int t = 0; t < w; ++t)
                    s += src[base + t * stride];
                out[o++] = s;
            }
    n = m;
    return out;
}

std::vector<double> box_sums(std::vector<double> field, std::array<int, 3> n, int w)
{
    for (int axis = 0; axis < 3; ++axis)
        field = window_sums(field, n, axis, w);
    return field;
}

} // namespace

double mse(const Volume& a, const Volume& b)
{
    require_same_shape(a, b);
    if (a.data.empty())
        return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return s / static_cast<double>(a.data.size());
}

double ssim(const Volume& a, const Volume& b)
{
    require_same_shape(a, b);
    if (b.data.empty())
        throw ShapeMismatch("ssim of empty volumes");
    const auto [lo, hi] = std::minmax_element(b.data.begin(), b.data.end());
    const double range = *hi - *lo;
    return ssim(a, b, range > 0.0 ? range : 1.0);
}

double ssim(const Volume& a, const Volume& b, double dynamic_range)
{
    require_same_shape(a, b);
    const int w = kSsimWindow;
    if (a.nx < w || a.ny < w || a.nz < w)
        throw ShapeMismatch("volume is smaller than the " + std::to_string(w) + "^3 SSIM window");
    const std::array<int, 3> n = {a.nx, a.ny, a.nz};
    const std::size_t count = a.data.size();
    std::vector<double> aa(count), bb(count), ab(count);
    for (std::size_t i = 0; i < count; ++i) {
        aa[i] = a.data[i] * a.data[i];
        bb[i] = b.data[i] * b.data[i];
        ab[i] = a.data[i] * b.data[i];
    }
    const auto sa = box_sums(a.data, n, w);
    const auto sb = box_sums(b.data, n, w);
    const auto saa = box_sums(aa, n, w);
    const auto sbb = box_sums(bb, n, w);
    const auto sab = box_sums(ab, n, w);

    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
    const double inv = 1.0 / (static_cast<double>(w) * w * w);
    double total = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        const double ma = sa[i] * inv;
        const double mb = sb[i] * inv;
        const double va = saa[i] * inv - ma * ma;
        const double vb = sbb[i] * inv - mb * mb;
        const double cov = sab[i] * inv - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return total / static_cast<double>(sa.size());
}

std::array<std::optional<double>, 6> param_l1(const MotionSpline& gt, const MotionSpline& est, int n_projections,
                                              const ScenarioMask& mask)
{
    for (const MotionSpline* s : {&gt, &est})
        if (s->node_indices.empty() || s->node_indices.back() != static_cast<double>(n_projections - 1))
            throw LengthMismatch("spline does not cover " + std::to_string(n_projections) + " projections");
    const auto g = expand(gt, n_projections);
    const auto e = expand(est, n_projections);
    std::array<std::optional<double>, 6> out;
    for (std::size_t r = 0; r < 6; ++r) {
        if (!mask.active[r])
            continue;
        double s = 0.0;
        for (int i = 0; i < n_projections; ++i)
            s += std::abs(g[static_cast<std::size_t>(i)][r] - e[static_cast<std::size_t>(i)][r]);
        const double unit = r < 3 ? 1000.0 : 1.0;
        out[r] = unit * s / n_projections;
    }
    return out;
}

} // namespace emc
