#include "emc/reconstruction.hpp"

#include "emc/errors.hpp"
#include "emc/parallel.hpp"

#include <Eigen/Geometry>
#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <mutex>
#include <numbers>
#include <string>

namespace emc {

namespace {

constexpr double pi = std::numbers::pi;

int next_pow2(int n)
{
    int p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

// FFTW planning is not thread safe; plans are made once and executed with the new-array API.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* real = nullptr;
    fftw_complex* spectrum = nullptr;
    explicit FftwBuffer(int n)
        : real(fftw_alloc_real(static_cast<std::size_t>(n))),
          spectrum(fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1)))
    {
    }
    ~FftwBuffer()
    {
        fftw_free(real);
        fftw_free(spectrum);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

class RampFilter {
public:
    RampFilter(int cols, double spacing, RampWindow window) : n_(next_pow2(2 * cols)), cols_(cols)
    {
        FftwBuffer buf(n_);
        {
            std::lock_guard lock(fftw_planner_mutex());
            forward_ = fftw_plan_dft_r2c_1d(n_, buf.real, buf.spectrum, FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_c2r_1d(n_, buf.spectrum, buf.real, FFTW_ESTIMATE);
        }
        // Spatial Ram-Lak kernel, wrapped so index 0 is the center tap.
        for (int i = 0; i < n_; ++i) {
            const int k = i <= n_ / 2 ? i : i - n_;
            double h = 0.0;
            if (k == 0)
                h = 1.0 / (4.0 * spacing * spacing);
            else if (k % 2 != 0)
                h = -1.0 / (pi * pi * k * k * spacing * spacing);
            buf.real[i] = h * spacing;
        }
        fftw_execute_dft_r2c(forward_, buf.real, buf.spectrum);
        response_.resize(static_cast<std::size_t>(n_ / 2 + 1));
        for (int f = 0; f <= n_ / 2; ++f) {
            double w = 1.0;
            if (window == RampWindow::Hann)
                w = 0.5 * (1.0 + std::cos(pi * f / (n_ / 2)));
            response_[static_cast<std::size_t>(f)] = buf.spectrum[f][0] * w / n_;
        }
    }
    ~RampFilter()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    RampFilter(const RampFilter&) = delete;
    RampFilter& operator=(const RampFilter&) = delete;

    void apply(double* row, FftwBuffer& buf) const
    {
        std::fill(buf.real, buf.real + n_, 0.0);
        std::copy(row, row + cols_, buf.real);
        fftw_execute_dft_r2c(forward_, buf.real, buf.spectrum);
        for (int f = 0; f <= n_ / 2; ++f) {
            buf.spectrum[f][0] *= response_[static_cast<std::size_t>(f)];
            buf.spectrum[f][1] *= response_[static_cast<std::size_t>(f)];
        }
        fftw_execute_dft_c2r(backward_, buf.spectrum, buf.real);
        std::copy(buf.real, buf.real + cols_, row);
    }

    int size() const { return n_; }

private:
    int n_;
    int cols_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
    std::vector<double> response_;
};

ProjectionImage weight_and_filter(const ProjectionImage& img, const ScanGeometry& g, int view, const RampFilter& ramp,
                                  FftwBuffer& buf)
{
    const double sdd = g.source_detector_mm;
    const double cx = 0.5 * (img.width - 1);
    const double cy = 0.5 * (img.height - 1);
    const double beta = g.view_angle(view);
    const double delta = 0.5 * (g.angular_range_deg * pi / 180.0 - pi);
    ProjectionImage out = img;
    std::vector<double> parker(static_cast<std::size_t>(img.width));
    for (int u = 0; u < img.width; ++u)
        parker[static_cast<std::size_t>(u)] = parker_weight(beta, column_fan_angle(g, u), delta);
    for (int v = 0; v < img.height; ++v) {
        const double vm = (v - cy) * g.pixel_pitch_mm;
        double* row = out.data.data() + static_cast<std::size_t>(v) * img.width;
        for (int u = 0; u < img.width; ++u) {
            const double um = (u - cx) * g.pixel_pitch_mm;
            row[u] *= parker[static_cast<std::size_t>(u)] * sdd / std::sqrt(sdd * sdd + um * um + vm * vm);
        }
        ramp.apply(row, buf);
    }
    return out;
}

double iso_spacing(const ScanGeometry& g)
{
    return g.pixel_pitch_mm * g.source_isocenter_mm / g.source_detector_mm;
}

} // namespace

double parker_weight(double beta, double gamma, double delta)
{
    if (beta < 0.0 || beta > pi + 2.0 * delta)
        return 0.0;
    auto s2 = [](double x) {
        const double s = std::sin(x);
        return s * s;
    };
    if (beta < 2.0 * delta - 2.0 * gamma)
        return s2(0.25 * pi * beta / (delta - gamma));
    if (beta <= pi - 2.0 * gamma)
        return 1.0;
    return s2(0.25 * pi * (pi + 2.0 * delta - beta) / (delta + gamma));
}

double column_fan_angle(const ScanGeometry& g, double u)
{
    const double um = (u - 0.5 * (g.detector_cols - 1)) * g.pixel_pitch_mm;
    return -std::atan(um / g.source_detector_mm);
}

ProjectionImage filter_projection(const ProjectionImage& img, const ScanGeometry& g, int view, RampWindow window)
{
    const RampFilter ramp(img.width, iso_spacing(g), window);
    FftwBuffer buf(ramp.size());
    return weight_and_filter(img, g, view, ramp, buf);
}

void check_field_of_view(const Volume& grid, std::span<const ProjectionMatrix> Ps, int rows, int cols)
{
    for (std::size_t i = 0; i < Ps.size(); ++i) {
        const ProjectionMatrix P = normalize_projection(Ps[i]);
        for (int c = 0; c < 8; ++c) {
            const Eigen::Vector3d x = grid.position((c & 1) ? grid.nx - 1 : 0, (c & 2) ? grid.ny - 1 : 0,
                                                    (c & 4) ? grid.nz - 1 : 0);
            const Eigen::Vector3d p = P * x.homogeneous();
            const double u = p(0) / p(2);
            const double v = p(1) / p(2);
            if (!(p(2) > 0.0) || u < -0.5 || u > cols - 0.5 || v < -0.5 || v > rows - 0.5)
                throw GridOutsideFov("reconstruction grid corner (" + std::to_string(x(0)) + ", " +
                                     std::to_string(x(1)) + ", " + std::to_string(x(2)) +
                                     ") mm leaves the detector of view " + std::to_string(i));
        }
    }
}

Volume fdk(std::span<const ProjectionImage> images, std::span<const ProjectionMatrix> Ps, const Volume& grid,
           const ScanGeometry& g, const FdkOptions& opts)
{
    if (images.size() != Ps.size())
        throw LengthMismatch("fdk got " + std::to_string(images.size()) + " images for " +
                             std::to_string(Ps.size()) + " projection matrices");
    if (static_cast<int>(Ps.size()) != g.n_projections)
        throw LengthMismatch("fdk got " + std::to_string(Ps.size()) + " projections, geometry has " +
                             std::to_string(g.n_projections));
    for (const auto& img : images)
        if (img.width != g.detector_cols || img.height != g.detector_rows)
            throw DimensionMismatch("projection size does not match the detector");
    check_field_of_view(grid, Ps, g.detector_rows, g.detector_cols);

    const RampFilter ramp(g.detector_cols, iso_spacing(g), opts.window);
    std::vector<ProjectionImage> filtered(images.size());
    std::vector<ProjectionMatrix> Pn(Ps.size());
    parallel_for(images.size(), opts.threads, [&](std::size_t i) {
        FftwBuffer buf(ramp.size());
        filtered[i] = weight_and_filter(images[i], g, static_cast<int>(i), ramp, buf);
        Pn[i] = normalize_projection(Ps[i]);
    });

    const double d_beta = g.angular_range_deg * pi / 180.0 / (g.n_projections - 1);
    const double sid2 = g.source_isocenter_mm * g.source_isocenter_mm;
    Volume out = grid;
    out.data.assign(grid.size(), 0.0);
    parallel_for(static_cast<std::size_t>(grid.nz), opts.threads, [&](std::size_t kz) {
        const int k = static_cast<int>(kz);
        for (std::size_t i = 0; i < Pn.size(); ++i) {
            const ProjectionMatrix& P = Pn[i];
            const ProjectionImage& img = filtered[i];
            for (int j = 0; j < grid.ny; ++j) {
                const Eigen::Vector3d row0 = P * grid.position(0, j, k).homogeneous();
                const Eigen::Vector3d step = P.col(0) * grid.spacing;
                double* dst = out.data.data() + grid.index(0, j, k);
                for (int x = 0; x < grid.nx; ++x) {
                    const Eigen::Vector3d p = row0 + x * step;
                    const double inv_w = 1.0 / p(2);
                    dst[x] += d_beta * sid2 * inv_w * inv_w * img.bilinear(p(0) * inv_w, p(1) * inv_w);
                }
            }
        }
    });
    return out;
}

} // namespace emc
