#include "emc/optimizer.hpp"

#include "emc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emc {

SimplexCoefficients adaptive_coefficients(int n)
{
    const double d = static_cast<double>(n);
    return {1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d};
}

namespace {

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

} // namespace

OptimizerResult nelder_mead_adaptive(const Objective& f, std::vector<double> x0, const OptimizerConfig& cfg)
{
    const std::size_t n = x0.size();
    if (n == 0)
        throw DimensionMismatch("optimizer needs at least one free parameter");
    if (cfg.bounds.size() != n)
        throw DimensionMismatch("bounds have " + std::to_string(cfg.bounds.size()) + " entries, x0 has " +
                                std::to_string(n));
    if (!cfg.initial_step.empty() && cfg.initial_step.size() != n)
        throw DimensionMismatch("initial_step size does not match x0");
    if (cfg.max_iter < 1)
        throw ValidationError("max_iter must be at least 1");
    for (const Bounds& b : cfg.bounds)
        if (!(b.lo < b.hi))
            throw ValidationError("every bound needs lo < hi");

    const SimplexCoefficients c = adaptive_coefficients(static_cast<int>(n));
    OptimizerResult result;

    auto clip = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = std::clamp(x[i], cfg.bounds[i].lo, cfg.bounds[i].hi);
    };
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return f(std::span<const double>(x));
    };

    clip(x0);
    std::vector<Vertex> simplex(n + 1);
    simplex[0].x = x0;
    simplex[0].f = eval(x0);
    for (std::size_t i = 0; i < n; ++i) {
        const double half_width = 0.5 * (cfg.bounds[i].hi - cfg.bounds[i].lo);
        const double step = cfg.initial_step.empty() ? 0.1 * half_width : cfg.initial_step[i];
        std::vector<double> x = x0;
        x[i] += step;
        if (x[i] > cfg.bounds[i].hi)
            x[i] = x0[i] - step;
        clip(x);
        simplex[i + 1].x = std::move(x);
        simplex[i + 1].f = eval(simplex[i + 1].x);
    }

    // Stable ordering keeps runs reproducible when values tie.
    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        // a + t * (b - a), clipped
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = a[i] + t * (b[i] - a[i]);
        clip(x);
        return x;
    };

    order();
    result.stop_reason = "max_iter";
    while (result.iterations < cfg.max_iter) {
        const Vertex& best = simplex.front();
        double size = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                size = std::max(size, std::abs(simplex[k].x[i] - best.x[i]));
        if (size <= cfg.x_tol) {
            result.stop_reason = "x_tol";
            break;
        }
        if (simplex.back().f - best.f <= cfg.f_tol * std::abs(best.f)) {
            result.stop_reason = "f_tol";
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                centroid[i] += simplex[k].x[i];
        for (double& v : centroid)
            v /= static_cast<double>(n);

        Vertex& worst = simplex.back();
        const double f_second_worst = simplex[n - 1].f;

        std::vector<double> xr = combine(centroid, worst.x, -c.reflection);
        const double fr = eval(xr);

        bool shrink = false;
        if (fr < simplex.front().f) {
            std::vector<double> xe = combine(centroid, xr, c.expansion);
            const double fe = eval(xe);
            if (fe < fr) {
                worst = {std::move(xe), fe};
            } else {
                worst = {std::move(xr), fr};
            }
        } else if (fr < f_second_worst) {
            worst = {std::move(xr), fr};
        } else if (fr < worst.f) {
            std::vector<double> xc = combine(centroid, xr, c.contraction);
            const double fc = eval(xc);
            if (fc <= fr)
                worst = {std::move(xc), fc};
            else
                shrink = true;
        } else {
            std::vector<double> xc = combine(centroid, worst.x, c.contraction);
            const double fc = eval(xc);
            if (fc < worst.f)
                worst = {std::move(xc), fc};
            else
                shrink = true;
        }

        if (shrink) {
            const std::vector<double> anchor = simplex.front().x;
            for (std::size_t k = 1; k <= n; ++k) {
                simplex[k].x = combine(anchor, simplex[k].x, c.shrink);
                simplex[k].f = eval(simplex[k].x);
            }
        }

        order();
        ++result.iterations;
        const HistoryEntry entry{result.iterations, simplex.front().f};
        result.history.push_back(entry);
        if (cfg.on_iteration)
            cfg.on_iteration(entry);
    }

    result.x_best = simplex.front().x;
    result.f_best = simplex.front().f;
    return result;
}

} // namespace emc
