#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace emc {

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct HistoryEntry {
    int iteration = 0;
    double f = 0.0;  ///< best value after this iteration
};

struct OptimizerConfig {
    int max_iter = 1000;
    double x_tol = 1e-6;   ///< max-norm simplex size
    double f_tol = 1e-10;  ///< relative spread of vertex values
    std::vector<Bounds> bounds;
    /// Per-coordinate simplex offsets; empty means 10% of each bound half-width.
    std::vector<double> initial_step;
    /// Called after every iteration.
    std::function<void(const HistoryEntry&)> on_iteration;
};

struct OptimizerResult {
    std::vector<double> x_best;
    double f_best = 0.0;
    int iterations = 0;
    int evaluations = 0;
    std::vector<HistoryEntry> history;
    std::string stop_reason;
};

/// Expansion/contraction coefficients that scale with the dimension n.
struct SimplexCoefficients {
    double reflection;
    double expansion;
    double contraction;
    double shrink;
};

SimplexCoefficients adaptive_coefficients(int n);

using Objective = std::function<double(std::span<const double>)>;

/// Bounded Nelder-Mead with dimension-adaptive coefficients. Every trial point
/// is clipped into the bounds box before it is evaluated. One iteration is one
/// reflect / expand / contract / shrink step.
OptimizerResult nelder_mead_adaptive(const Objective& f, std::vector<double> x0, const OptimizerConfig& cfg);

} // namespace emc
