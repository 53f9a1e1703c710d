#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace emc {

/// Detector image of line-integral values, row-major (index = row * width + col).
struct ProjectionImage {
    int width = 0;
    int height = 0;
    double spacing = 1.0;  ///< mm per pixel
    std::vector<double> data;

    ProjectionImage() = default;
    ProjectionImage(int w, int h, double pixel_spacing);

    double& at(int col, int row) { return data[static_cast<std::size_t>(row) * width + col]; }
    double at(int col, int row) const { return data[static_cast<std::size_t>(row) * width + col]; }

    /// Bilinear interpolation at pixel coordinates; zero outside the pixel grid.
    double bilinear(double u, double v) const;
};

/// d/dt of the 2D Radon transform on a regular (alpha, t) grid.
///
/// alpha_i = i * alpha_spacing for i in [0, n_alpha), covering [0, pi).
/// t_j = -t_max + j * t_spacing for j in [0, n_t), symmetric about 0.
/// Line coordinates are measured from the image center ((width-1)/2, (height-1)/2).
struct RadonDerivativeTable {
    int n_alpha = 0;
    int n_t = 0;
    double alpha_spacing = 0.0;
    double t_spacing = 0.0;
    double t_max = 0.0;
    int image_width = 0;
    int image_height = 0;
    std::vector<double> data;  ///< n_alpha rows of n_t samples

    double value(int i_alpha, int j_t) const { return data[static_cast<std::size_t>(i_alpha) * n_t + j_t]; }
    double t_at(int j) const { return -t_max + j * t_spacing; }
    double alpha_at(int i) const { return i * alpha_spacing; }
};

/// Half the image diagonal in pixels.
double radon_t_max(int width, int height);

/// Smallest odd count >= the image diagonal in pixels.
int default_n_t(int width, int height);

inline constexpr int kDefaultNAlpha = 200;
inline constexpr double kLineStep = 0.5;  ///< pixels

/// Line integral of the bilinearly interpolated image along
/// cos(alpha) x + sin(alpha) y = t (centered coordinates), sampled every `step` pixels.
double radon_line_integral(const ProjectionImage& img, double alpha, double t, double step = kLineStep);

/// Throws InvalidGrid unless n_alpha >= 2 and n_t >= 3 is odd.
RadonDerivativeTable radon_derivative(const ProjectionImage& img, int n_alpha, int n_t);
RadonDerivativeTable radon_derivative(const ProjectionImage& img);

/// Bilinear lookup. alpha outside [0, pi) is folded with
/// rho'(alpha + pi, -t) = -rho'(alpha, t); |t| > t_max gives 0.
double sample(const RadonDerivativeTable& table, double alpha, double t);

/// Disk cache: `<base>.raw` (little-endian float32) + `<base>.json` sidecar.
void save_table(const RadonDerivativeTable& table, const std::filesystem::path& base);
RadonDerivativeTable load_table(const std::filesystem::path& base);

} // namespace emc
