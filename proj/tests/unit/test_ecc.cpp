#include "emc/ecc.hpp"
#include "emc/errors.hpp"
#include "emc/simulation.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <numeric>

using namespace emc;

namespace {

struct Scene {
    ScanGeometry g;
    std::vector<ProjectionMatrix> Ps;
    std::vector<ProjectionImage> images;
    std::vector<RadonDerivativeTable> tables;
};

Scene make_scene(std::string_view phantom, int n_projections, int threads = 4)
{
    Scene s;
    s.g.n_projections = n_projections;
    s.Ps = short_scan_trajectory(s.g);
    const Phantom ph = make_phantom(phantom);
    for (const auto& P : s.Ps)
        s.images.push_back(forward_project(ph, P, s.g.detector_rows, s.g.detector_cols, s.g.pixel_pitch_mm, 4));
    s.tables = prepare_tables(s.images, s.Ps, kDefaultNAlpha, default_n_t(s.g.detector_cols, s.g.detector_rows),
                              threads);
    return s;
}

const Scene& tibia_scene()
{
    static const Scene s = make_scene("tibia-like", 12);
    return s;
}

std::vector<RigidParams> zeros(std::size_t n)
{
    return std::vector<RigidParams>(n, RigidParams{});
}

} // namespace

TEST_CASE("consistent sphere pair is far below the 50 um tz perturbed pair")
{
    const Scene s = make_scene("single-sphere", 7);
    const EccConfig cfg;
    for (auto [i, j] : {std::pair{0, 2}, std::pair{1, 5}, std::pair{0, 6}}) {
        const double clean = pair_inconsistency(s.Ps[i], s.Ps[j], s.tables[i], s.tables[j], cfg);
        const ProjectionMatrix moved = apply_motion(s.Ps[j], RigidParams{0, 0, 0.05, 0, 0, 0});
        const double perturbed = pair_inconsistency(s.Ps[i], moved, s.tables[i], s.tables[j], cfg);
        INFO("pair " << i << "," << j << " clean " << clean << " perturbed " << perturbed);
        CHECK(clean <= 1e-3 * perturbed);
    }
}

TEST_CASE("identical sources raise DegenerateBaseline")
{
    const Scene& s = tibia_scene();
    CHECK_THROWS_AS(pair_inconsistency(s.Ps[3], s.Ps[3], s.tables[3], s.tables[3], EccConfig{}), DegenerateBaseline);
}

TEST_CASE("all-zero images give zero cost")
{
    const Scene& s = tibia_scene();
    std::vector<ProjectionImage> blank;
    for (const auto& img : s.images)
        blank.emplace_back(img.width, img.height, img.spacing);
    const auto tables = prepare_tables(blank, s.Ps, 64, 33);
    CHECK(pair_inconsistency(s.Ps[0], s.Ps[5], tables[0], tables[5], EccConfig{}) == 0.0);
    CHECK(total_cost(s.Ps, tables, zeros(s.Ps.size()), EccConfig{}) == 0.0);
}

TEST_CASE("total_cost of two views equals the pair term")
{
    const Scene& s = tibia_scene();
    const std::array<ProjectionMatrix, 2> Ps{s.Ps[2], s.Ps[9]};
    const std::array<RadonDerivativeTable, 2> tables{s.tables[2], s.tables[9]};
    const EccConfig cfg;
    CHECK(total_cost(Ps, tables, zeros(2), cfg) == pair_inconsistency(Ps[0], Ps[1], tables[0], tables[1], cfg));
}

TEST_CASE("pair_inconsistency is symmetric")
{
    const Scene& s = tibia_scene();
    const ProjectionMatrix moved = apply_motion(s.Ps[7], RigidParams{0.02, -0.03, 0.05, 0.4, -0.3, 0.2});
    const EccConfig cfg;
    const double ab = pair_inconsistency(s.Ps[1], moved, s.tables[1], s.tables[7], cfg);
    const double ba = pair_inconsistency(moved, s.Ps[1], s.tables[7], s.tables[1], cfg);
    CHECK(std::abs(ab - ba) <= 1e-12 * ab);
}

TEST_CASE("reduction is bit-identical across thread counts and equals the ordered pair sum")
{
    const Scene& s = tibia_scene();
    const MotionSpline spline =
        random_motion_spline(static_cast<int>(s.Ps.size()), 4, mask_for(Scenario::Full), 0.05, 1.0, 5);
    const auto params = expand(spline, static_cast<int>(s.Ps.size()));
    EccConfig cfg;
    cfg.threads = 1;
    const double one = total_cost(s.Ps, s.tables, params, cfg);
    const auto terms = pair_costs(s.Ps, s.tables, params, cfg);
    cfg.threads = 3;
    const double three = total_cost(s.Ps, s.tables, params, cfg);
    CHECK(one == three);
    CHECK(one == std::accumulate(terms.begin(), terms.end(), 0.0));
    CHECK(terms.size() == evaluation_pairs(static_cast<int>(s.Ps.size()), 1).size());
}

TEST_CASE("evaluation_pairs honours the stride")
{
    const auto all = evaluation_pairs(5, 1);
    CHECK(all.size() == 10);
    CHECK(all.front() == std::pair{0, 1});
    CHECK(all.back() == std::pair{3, 4});
    for (auto [i, j] : evaluation_pairs(7, 3))
        CHECK((j - i) % 3 == 0);
    CHECK(evaluation_pairs(7, 3).size() == 5);
}

TEST_CASE("input validation")
{
    const Scene& s = tibia_scene();
    EccConfig bad;
    bad.kappa_step = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = EccConfig{};
    bad.kappa_max = 0.5 * bad.kappa_step;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = EccConfig{};
    bad.pair_stride = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(total_cost(s.Ps, s.tables, zeros(3), EccConfig{}), LengthMismatch);
}

TEST_CASE("clean geometry beats the injected corruption")
{
    const Scene& s = tibia_scene();
    const int n = static_cast<int>(s.Ps.size());
    EccConfig cfg;
    cfg.threads = 4;
    const double clean = total_cost(s.Ps, s.tables, zeros(s.Ps.size()), cfg);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const MotionSpline gt = random_motion_spline(n, 4, mask_for(Scenario::OutOfPlane), 0.05, 1.0, seed);
        const double corrupted = total_cost(s.Ps, s.tables, expand(gt, n), cfg);
        CHECK(clean < corrupted);
    }
}

TEST_CASE("clean geometry is a local minimum along the axes of projection 0")
{
    const Scene& s = tibia_scene();
    EccConfig cfg;
    cfg.threads = 4;
    const double clean = total_cost(s.Ps, s.tables, zeros(s.Ps.size()), cfg);
    for (int axis = 0; axis < 6; ++axis)
        for (double sign : {-1.0, 1.0}) {
            auto params = zeros(s.Ps.size());
            std::array<double, 6> p{};
            p[static_cast<std::size_t>(axis)] = sign * (axis < 3 ? 0.05 : 1.0);
            params[0] = RigidParams{p[0], p[1], p[2], p[3], p[4], p[5]};
            const double probed = total_cost(s.Ps, s.tables, params, cfg);
            INFO("axis " << axis << " sign " << sign << " clean " << clean << " probed " << probed);
            if (axis == 5)
                CHECK(probed >= clean);
            else
                CHECK(probed > clean);
        }
}
