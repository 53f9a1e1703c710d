#pragma once

#include "emc/motion_model.hpp"
#include "emc/volume.hpp"

#include <array>
#include <optional>

namespace emc {

inline constexpr int kSsimWindow = 7;

/// Mean squared difference. Throws ShapeMismatch.
double mse(const Volume& a, const Volume& b);

/// Mean SSIM over all fully contained 7^3 windows, with population statistics and
/// dynamic range max(b) - min(b) (1 for a constant b). Throws ShapeMismatch, also
/// when a side is shorter than the window.
double ssim(const Volume& a, const Volume& b);
double ssim(const Volume& a, const Volume& b, double dynamic_range);

/// Mean over views of |gt_i - est_i| per parameter; translations in micrometres,
/// rotations in degrees. Entries of inactive parameters are empty.
std::array<std::optional<double>, 6> param_l1(const MotionSpline& gt, const MotionSpline& est, int n_projections,
                                              const ScenarioMask& mask);

} // namespace emc
