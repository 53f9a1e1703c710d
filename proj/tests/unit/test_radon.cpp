#include "emc/errors.hpp"
#include "emc/radon.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace emc;

using oracle::gaussian_blobs;

TEST_CASE("grid defaults and validation")
{
    CHECK(default_n_t(96, 64) == 117);
    CHECK(default_n_t(32, 32) == 47);
    CHECK(radon_t_max(3, 4) == 2.5);
    ProjectionImage img(8, 8, 1.0);
    CHECK_THROWS_AS(radon_derivative(img, 1, 11), InvalidGrid);
    CHECK_THROWS_AS(radon_derivative(img, 8, 10), InvalidGrid);
}

TEST_CASE("zero image gives a zero table")
{
    const auto table = radon_derivative(ProjectionImage(20, 14, 1.0), 16, 25);
    for (double v : table.data)
        CHECK(v == 0.0);
}

TEST_CASE("centered Gaussian is antisymmetric in t")
{
    ProjectionImage img(33, 33, 1.0);
    for (int v = 0; v < 33; ++v)
        for (int u = 0; u < 33; ++u)
            img.at(u, v) = std::exp(-((u - 16.0) * (u - 16.0) + (v - 16.0) * (v - 16.0)) / (2 * 9.0));
    const auto table = radon_derivative(img, 24, 47);
    double peak = 0.0;
    for (double v : table.data)
        peak = std::max(peak, std::abs(v));
    for (int i = 0; i < table.n_alpha; ++i)
        for (int j = 0; j < table.n_t; ++j)
            CHECK(std::abs(table.value(i, j) + table.value(i, table.n_t - 1 - j)) <= 1e-3 * peak);
}

TEST_CASE("table matches a dense integration oracle within 2%")
{
    CHECK(oracle::radon_table_error() <= 0.02);
}

TEST_CASE("sample: grid identity, fold rule, support")
{
    const ProjectionImage img = gaussian_blobs(24, 18, 4, 3);
    const auto table = radon_derivative(img, 30, 31);
    CHECK(sample(table, table.alpha_at(7), table.t_at(12)) == table.value(7, 12));
    CHECK(sample(table, table.alpha_at(0), table.t_at(30)) == table.value(0, 30));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> a(-3 * std::numbers::pi, 3 * std::numbers::pi);
    std::uniform_real_distribution<double> t(-table.t_max, table.t_max);
    for (int k = 0; k < 500; ++k) {
        const double alpha = a(rng), tt = t(rng);
        CHECK(std::abs(sample(table, alpha + std::numbers::pi, -tt) + sample(table, alpha, tt)) <= 1e-12);
    }
    CHECK(sample(table, 0.3, table.t_max + 1.0) == 0.0);
    CHECK(sample(table, 0.3, -table.t_max - 1.0) == 0.0);
}

TEST_CASE("linearity")
{
    const ProjectionImage a = gaussian_blobs(20, 16, 1, 3);
    const ProjectionImage b = gaussian_blobs(20, 16, 2, 2);
    ProjectionImage c(20, 16, 1.0);
    for (std::size_t i = 0; i < c.data.size(); ++i)
        c.data[i] = 2.0 * a.data[i] - 0.5 * b.data[i];
    const auto ta = radon_derivative(a, 12, 27), tb = radon_derivative(b, 12, 27), tc = radon_derivative(c, 12, 27);
    double scale = 0.0;
    for (double v : tc.data)
        scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < tc.data.size(); ++i)
        CHECK(std::abs(tc.data[i] - (2.0 * ta.data[i] - 0.5 * tb.data[i])) <= 1e-9 * scale);
}

TEST_CASE("integrating the derivative recovers the Radon transform")
{
    const ProjectionImage img = gaussian_blobs(32, 32, 8, 4);
    // Trapezoid integration of central differences carries an h^2 rho''/4 bias, so use a fine t grid.
    const auto table = radon_derivative(img, 10, 4 * (default_n_t(32, 32) - 1) + 1);
    for (int i = 0; i < table.n_alpha; ++i) {
        double peak = 0.0, worst = 0.0, acc = 0.0;
        const double a = table.alpha_at(i);
        const double rho0 = radon_line_integral(img, a, table.t_at(0));
        for (int j = 1; j < table.n_t; ++j) {
            acc += 0.5 * (table.value(i, j - 1) + table.value(i, j)) * table.t_spacing;
            const double rho = radon_line_integral(img, a, table.t_at(j)) - rho0;
            peak = std::max(peak, std::abs(rho));
            worst = std::max(worst, std::abs(acc - rho));
        }
        CHECK(worst <= 0.01 * peak);
    }
}

TEST_CASE("line integral of a constant image is the chord length")
{
    ProjectionImage img(41, 41, 1.0);
    std::fill(img.data.begin(), img.data.end(), 1.0);
    // Bilinear support is 40 px wide at full weight plus two half-weight ramps.
    CHECK(radon_line_integral(img, 0.0, 0.0) == doctest::Approx(41.0).epsilon(1e-12));
    CHECK(radon_line_integral(img, 0.0, 100.0) == 0.0);
}

TEST_CASE("table save/load round trip")
{
    const auto table = radon_derivative(gaussian_blobs(16, 12, 3, 2), 8, 21);
    const auto dir = std::filesystem::temp_directory_path() / "emc_test_radon";
    std::filesystem::create_directories(dir);
    save_table(table, dir / "t0");
    const auto back = load_table(dir / "t0");
    CHECK(back.n_alpha == table.n_alpha);
    CHECK(back.n_t == table.n_t);
    CHECK(back.t_max == table.t_max);
    for (std::size_t i = 0; i < table.data.size(); ++i)
        CHECK(back.data[i] == static_cast<double>(static_cast<float>(table.data[i])));
    std::filesystem::remove_all(dir);
}
