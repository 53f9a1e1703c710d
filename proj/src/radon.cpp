#include "emc/radon.hpp"

#include "emc/errors.hpp"
#include "emc/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace emc {

ProjectionImage::ProjectionImage(int w, int h, double pixel_spacing)
    : width(w), height(h), spacing(pixel_spacing),
      data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0)
{
}

double ProjectionImage::bilinear(double u, double v) const
{
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const int u0 = static_cast<int>(fu);
    const int v0 = static_cast<int>(fv);
    if (u0 < -1 || v0 < -1 || u0 >= width || v0 >= height)
        return 0.0;
    const double a = u - fu;
    const double b = v - fv;
    if (u0 >= 0 && v0 >= 0 && u0 + 1 < width && v0 + 1 < height) {
        const double* p = data.data() + static_cast<std::size_t>(v0) * width + u0;
        return (1.0 - b) * ((1.0 - a) * p[0] + a * p[1]) + b * ((1.0 - a) * p[width] + a * p[width + 1]);
    }
    auto px = [&](int c, int r) {
        return (c < 0 || r < 0 || c >= width || r >= height) ? 0.0 : at(c, r);
    };
    return (1.0 - b) * ((1.0 - a) * px(u0, v0) + a * px(u0 + 1, v0)) +
           b * ((1.0 - a) * px(u0, v0 + 1) + a * px(u0 + 1, v0 + 1));
}

double radon_t_max(int width, int height)
{
    return 0.5 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

int default_n_t(int width, int height)
{
    int n = static_cast<int>(std::ceil(std::hypot(static_cast<double>(width), static_cast<double>(height))));
    if (n % 2 == 0)
        ++n;
    return std::max(n, 3);
}

namespace {

// Parameter interval [lo, hi] where x0 + s * d stays inside (lo_bound, hi_bound).
void clip_slab(double x0, double d, double lo_bound, double hi_bound, double& lo, double& hi)
{
    if (std::abs(d) < 1e-15) {
        if (x0 <= lo_bound || x0 >= hi_bound) {
            lo = 1.0;
            hi = -1.0;
        }
        return;
    }
    double s0 = (lo_bound - x0) / d;
    double s1 = (hi_bound - x0) / d;
    if (s0 > s1)
        std::swap(s0, s1);
    lo = std::max(lo, s0);
    hi = std::min(hi, s1);
}

} // namespace

double radon_line_integral(const ProjectionImage& img, double alpha, double t, double step)
{
    const double cx = 0.5 * (img.width - 1);
    const double cy = 0.5 * (img.height - 1);
    const double T = radon_t_max(img.width, img.height);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    const double x0 = cx + t * ca;
    const double y0 = cy + t * sa;

    // Lattice s_k = k * step about the foot point; only the part inside the bilinear support is visited.
    double lo = -T - 2.0;
    double hi = T + 2.0;
    clip_slab(x0, -sa, -1.0, img.width, lo, hi);
    clip_slab(y0, ca, -1.0, img.height, lo, hi);
    if (lo > hi)
        return 0.0;
    const int k_lo = static_cast<int>(std::ceil(lo / step));
    const int k_hi = static_cast<int>(std::floor(hi / step));

    double sum = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double s = k * step;
        sum += img.bilinear(x0 - s * sa, y0 + s * ca);
    }
    return sum * step;
}

RadonDerivativeTable radon_derivative(const ProjectionImage& img, int n_alpha, int n_t)
{
    if (n_alpha < 2)
        throw InvalidGrid("n_alpha must be at least 2");
    if (n_t < 3 || n_t % 2 == 0)
        throw InvalidGrid("n_t must be odd and at least 3");
    if (img.width <= 0 || img.height <= 0 ||
        img.data.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
        throw InvalidGrid("image dimensions do not match its data");

    RadonDerivativeTable table;
    table.n_alpha = n_alpha;
    table.n_t = n_t;
    table.alpha_spacing = std::numbers::pi / n_alpha;
    table.t_max = radon_t_max(img.width, img.height);
    table.t_spacing = 2.0 * table.t_max / (n_t - 1);
    table.image_width = img.width;
    table.image_height = img.height;
    table.data.resize(static_cast<std::size_t>(n_alpha) * n_t);

    std::vector<double> rho(static_cast<std::size_t>(n_t) + 2);
    for (int i = 0; i < n_alpha; ++i) {
        const double alpha = table.alpha_at(i);
        for (int j = -1; j <= n_t; ++j)
            rho[static_cast<std::size_t>(j + 1)] = radon_line_integral(img, alpha, table.t_at(j));
        double* row = table.data.data() + static_cast<std::size_t>(i) * n_t;
        for (int j = 0; j < n_t; ++j)
            row[j] = (rho[static_cast<std::size_t>(j + 2)] - rho[static_cast<std::size_t>(j)]) / (2.0 * table.t_spacing);
    }
    return table;
}

RadonDerivativeTable radon_derivative(const ProjectionImage& img)
{
    return radon_derivative(img, kDefaultNAlpha, default_n_t(img.width, img.height));
}

namespace {

double row_lookup(const RadonDerivativeTable& table, int i, double t)
{
    if (std::abs(t) > table.t_max)
        return 0.0;
    const double x = (t + table.t_max) / table.t_spacing;
    const int j0 = std::clamp(static_cast<int>(std::floor(x)), 0, table.n_t - 2);
    const double f = x - j0;
    const double* row = table.data.data() + static_cast<std::size_t>(i) * table.n_t;
    return (1.0 - f) * row[j0] + f * row[j0 + 1];
}

} // namespace

double sample(const RadonDerivativeTable& table, double alpha, double t)
{
    constexpr double pi = std::numbers::pi;
    double sign = 1.0;
    double a = alpha;
    if (a < 0.0 && a >= -pi) {
        a += pi;
        sign = -1.0;
        t = -t;
    } else if (!(a >= 0.0 && a < pi)) {
        const double turns = std::floor(alpha / pi);
        a = alpha - turns * pi;
        if (std::fmod(std::abs(turns), 2.0) == 1.0) {
            sign = -sign;
            t = -t;
        }
    }
    if (a >= pi) {
        a -= pi;
        sign = -sign;
        t = -t;
    }
    if (a < 0.0)
        a = 0.0;
    if (std::abs(t) > table.t_max)
        return 0.0;

    const double x = a / table.alpha_spacing;
    const int i0 = std::min(static_cast<int>(std::floor(x)), table.n_alpha - 1);
    const double f = x - i0;
    const double v0 = row_lookup(table, i0, t);
    if (f == 0.0)
        return sign * v0;
    const double v1 = (i0 + 1 < table.n_alpha) ? row_lookup(table, i0 + 1, t) : -row_lookup(table, 0, -t);
    return sign * ((1.0 - f) * v0 + f * v1);
}

void save_table(const RadonDerivativeTable& table, const std::filesystem::path& base)
{
    io::json meta = {
        {"n_alpha", table.n_alpha},
        {"n_t", table.n_t},
        {"alpha_spacing", table.alpha_spacing},
        {"t_spacing", table.t_spacing},
        {"t_max", table.t_max},
        {"image_width", table.image_width},
        {"image_height", table.image_height},
        {"dtype", "float32-le"},
    };
    io::write_json(std::filesystem::path(base).concat(".json"), meta);
    io::write_f32_le(std::filesystem::path(base).concat(".raw"), table.data);
}

RadonDerivativeTable load_table(const std::filesystem::path& base)
{
    const io::json meta = io::read_json(std::filesystem::path(base).concat(".json"));
    RadonDerivativeTable table;
    try {
        table.n_alpha = meta.at("n_alpha").get<int>();
        table.n_t = meta.at("n_t").get<int>();
        table.alpha_spacing = meta.at("alpha_spacing").get<double>();
        table.t_spacing = meta.at("t_spacing").get<double>();
        table.t_max = meta.at("t_max").get<double>();
        table.image_width = meta.at("image_width").get<int>();
        table.image_height = meta.at("image_height").get<int>();
    } catch (const io::json::exception& e) {
        throw ValidationError(base.string() + ".json: " + e.what());
    }
    if (table.n_alpha < 2 || table.n_t < 3 || table.n_t % 2 == 0)
        throw InvalidGrid(base.string() + ".json: invalid table grid");
    table.data = io::read_f32_le(std::filesystem::path(base).concat(".raw"),
                                 static_cast<std::size_t>(table.n_alpha) * table.n_t);
    return table;
}

} // namespace emc
