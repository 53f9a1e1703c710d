#pragma once

#include "emc/optimizer.hpp"
#include "emc/radon.hpp"
#include "emc/simulation.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace emc::oracle {

/// Sum of random Gaussian blobs placed in the middle of a w x h image.
ProjectionImage gaussian_blobs(int w, int h, std::uint64_t seed, int count);

/// Line integral of the bilinear image along (alpha, t), summed at a fixed fine step.
double dense_line_integral(const ProjectionImage& img, double alpha, double t, double step);

/// Midpoint quadrature of the phantom density along origin + s dir for s in [s0, s1],
/// with steps straddling a surface split at the bisected crossing.
double ray_quadrature(const Phantom& ph, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double s0,
                      double s1, double h);

/// Max |table - central difference of dense integrals| over the grid, relative to the oracle peak.
double radon_table_error();

/// Max relative difference between forward_project rays and ray_quadrature at step r / 1000.
double projector_error();

/// Max normalized |l . P X| for points X sampled on epipolar planes of perturbed trajectory views.
double epipolar_incidence_residual();

/// Adaptive Nelder-Mead on the six-dimensional sphere function from x = 1 with a 2000 iteration budget.
OptimizerResult nelder_mead_sphere();

} // namespace emc::oracle
