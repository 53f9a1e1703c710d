#include "emc/ecc.hpp"

#include "emc/errors.hpp"
#include "emc/parallel.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>

namespace emc {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct ViewGeometry {
    const RadonDerivativeTable* table = nullptr;
    ProjectionMatrix P;
    HomogeneousPoint source;
    Eigen::Matrix<double, 3, 4> line_map;
    Eigen::Vector3d principal_ray;
    Eigen::Vector2d center;
    std::array<Eigen::Vector3d, 4> corner_points;
};

ViewGeometry make_view(const ProjectionMatrix& P, const RadonDerivativeTable& table)
{
    ViewGeometry v;
    v.table = &table;
    v.P = normalize_projection(P);
    v.source = source_position(v.P);
    v.line_map = plane_to_line_map(v.P);
    v.principal_ray = v.P.block<1, 3>(2, 0).transpose();
    v.center = Eigen::Vector2d(0.5 * (table.image_width - 1), 0.5 * (table.image_height - 1));
    const Eigen::Matrix3d Minv = v.P.block<3, 3>(0, 0).inverse();
    const double u1 = table.image_width - 0.5;
    const double v1 = table.image_height - 0.5;
    const std::array<Eigen::Vector3d, 4> corners = {
        Eigen::Vector3d(-0.5, -0.5, 1.0), Eigen::Vector3d(u1, -0.5, 1.0),
        Eigen::Vector3d(u1, v1, 1.0), Eigen::Vector3d(-0.5, v1, 1.0)};
    for (std::size_t k = 0; k < 4; ++k)
        v.corner_points[k] = v.source.head<3>() + Minv * corners[k];
    return v;
}

double fold_half_turn(double k)
{
    // Planes are unoriented in the pencil: map to (-pi/2, pi/2].
    while (k > kHalfPi)
        k -= std::numbers::pi;
    while (k <= -kHalfPi)
        k += std::numbers::pi;
    return k;
}

bool epipole_on_detector(const ViewGeometry& view, const HomogeneousPoint& other_source)
{
    const Eigen::Vector3d e = view.P * other_source;
    if (std::abs(e(2)) < 1e-12 * e.norm())
        return false;
    const double u = e(0) / e(2);
    const double v = e(1) / e(2);
    return u >= -0.5 && u <= view.table->image_width - 0.5 && v >= -0.5 && v <= view.table->image_height - 0.5;
}

// Largest |kappa| at which an epipolar plane still meets one of the detectors.
double pencil_extent(const PlanePencil& pencil, const ViewGeometry& a, const ViewGeometry& b)
{
    if (epipole_on_detector(a, b.source) || epipole_on_detector(b, a.source))
        return kHalfPi;
    const Eigen::Vector3d c0 = a.source.head<3>();
    const Eigen::Vector3d u = pencil.ref.head<3>();
    const Eigen::Vector3d w = pencil.orth.head<3>();
    double extent = 0.0;
    for (const ViewGeometry* view : {&a, &b}) {
        double first = 0.0;
        double lo = 0.0;
        double hi = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            const Eigen::Vector3d n = pencil.baseline.cross(view->corner_points[k] - c0);
            const double kappa = fold_half_turn(std::atan2(n.dot(w), n.dot(u)));
            if (k == 0) {
                first = kappa;
                continue;
            }
            const double delta = fold_half_turn(kappa - first);
            lo = std::min(lo, delta);
            hi = std::max(hi, delta);
        }
        lo += first;
        hi += first;
        if (lo <= -kHalfPi || hi > kHalfPi)
            return kHalfPi;
        extent = std::max({extent, std::abs(lo), std::abs(hi)});
    }
    return extent;
}

struct PencilLines {
    HomogeneousLine ref;
    HomogeneousLine orth;
    double axis_ref = 0.0;   ///< pencil.ref normal . principal ray
    double axis_orth = 0.0;  ///< pencil.orth normal . principal ray
};

PencilLines pencil_lines(const ViewGeometry& view, const PlanePencil& pencil)
{
    PencilLines pl;
    pl.ref = shift_origin(view.line_map * pencil.ref, view.center);
    pl.orth = shift_origin(view.line_map * pencil.orth, view.center);
    pl.axis_ref = pencil.ref.head<3>().dot(view.principal_ray);
    pl.axis_orth = pencil.orth.head<3>().dot(view.principal_ray);
    return pl;
}

// Plane derivative seen by one view for the pencil plane at (cos k, sin k).
double plane_derivative(const PencilLines& pl, const RadonDerivativeTable& table, double c, double s)
{
    const HomogeneousLine l = c * pl.ref + s * pl.orth;
    const double norm = std::sqrt(l(0) * l(0) + l(1) * l(1));
    if (!(norm > 1e-12 * std::abs(l(2))))
        return 0.0;
    const double axis = c * pl.axis_ref + s * pl.axis_orth;
    const double weight = 1.0 / (1.0 - axis * axis);
    return weight * sample(table, std::atan2(l(1), l(0)), -l(2) / norm);
}

// cos/sin of k * step for k >= 0, cached per thread and rebuilt when the step changes.
struct KappaTable {
    double step = 0.0;
    std::vector<double> cos;
    std::vector<double> sin;
};

const KappaTable& kappa_table(double step, int K)
{
    thread_local KappaTable table;
    if (table.step != step || static_cast<int>(table.cos.size()) <= K) {
        if (table.step != step) {
            table.cos.clear();
            table.sin.clear();
        }
        table.step = step;
        for (int k = static_cast<int>(table.cos.size()); k <= K; ++k) {
            table.cos.push_back(std::cos(k * step));
            table.sin.push_back(std::sin(k * step));
        }
    }
    return table;
}

double pair_term(const ViewGeometry& a, const ViewGeometry& b, const EccConfig& cfg)
{
    const PlanePencil pencil = epipolar_pencil(a.source, b.source);
    const double extent = cfg.kappa_max ? std::min(*cfg.kappa_max, kHalfPi) : pencil_extent(pencil, a, b);
    const int K = static_cast<int>(std::floor(extent / cfg.kappa_step + 1e-9));
    const PencilLines la = pencil_lines(a, pencil);
    const PencilLines lb = pencil_lines(b, pencil);

    const KappaTable& kt = kappa_table(cfg.kappa_step, K);
    double sum = 0.0;
    for (int k = -K; k <= K; ++k) {
        const double c = kt.cos[static_cast<std::size_t>(std::abs(k))];
        const double s = k < 0 ? -kt.sin[static_cast<std::size_t>(-k)] : kt.sin[static_cast<std::size_t>(k)];
        const double dm = plane_derivative(la, *a.table, c, s) - plane_derivative(lb, *b.table, c, s);
        sum += dm * dm;
    }
    return sum;
}

} // namespace

void EccConfig::validate() const
{
    if (!(kappa_step > 0.0))
        throw ValidationError("kappa_step must be positive");
    if (kappa_max && !(*kappa_max >= kappa_step))
        throw ValidationError("kappa_max must be at least kappa_step");
    if (pair_stride < 1)
        throw ValidationError("pair_stride must be a positive integer");
}

ProjectionImage cosine_weighted(const ProjectionImage& img, const ProjectionMatrix& P)
{
    const ProjectionMatrix Pn = normalize_projection(P);
    const Eigen::Matrix3d Minv = Pn.block<3, 3>(0, 0).inverse();
    ProjectionImage out = img;
    for (int v = 0; v < img.height; ++v)
        for (int u = 0; u < img.width; ++u)
            out.at(u, v) *= 1.0 / (Minv * Eigen::Vector3d(u, v, 1.0)).norm();
    return out;
}

std::vector<RadonDerivativeTable> prepare_tables(std::span<const ProjectionImage> images,
                                                 std::span<const ProjectionMatrix> Ps, int n_alpha, int n_t,
                                                 int threads)
{
    if (images.size() != Ps.size())
        throw LengthMismatch("got " + std::to_string(images.size()) + " images for " + std::to_string(Ps.size()) +
                             " projection matrices");
    std::vector<RadonDerivativeTable> tables(images.size());
    parallel_for(images.size(), threads, [&](std::size_t i) {
        tables[i] = radon_derivative(cosine_weighted(images[i], Ps[i]), n_alpha, n_t);
    });
    return tables;
}

double pair_inconsistency(const ProjectionMatrix& P0, const ProjectionMatrix& P1, const RadonDerivativeTable& T0,
                          const RadonDerivativeTable& T1, const EccConfig& cfg)
{
    cfg.validate();
    return pair_term(make_view(P0, T0), make_view(P1, T1), cfg);
}

std::vector<std::pair<int, int>> evaluation_pairs(int n, int stride)
{
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + stride; j < n; j += stride)
            pairs.emplace_back(i, j);
    return pairs;
}

std::vector<double> pair_costs(std::span<const ProjectionMatrix> Ps, std::span<const RadonDerivativeTable> tables,
                               std::span<const RigidParams> params, const EccConfig& cfg)
{
    cfg.validate();
    const std::size_t n = Ps.size();
    if (tables.size() != n || params.size() != n)
        throw LengthMismatch("total_cost needs one table and one parameter set per projection matrix (got " +
                             std::to_string(n) + " matrices, " + std::to_string(tables.size()) + " tables, " +
                             std::to_string(params.size()) + " parameter sets)");
    if (n < 2)
        throw LengthMismatch("total_cost needs at least two projections");

    std::vector<ViewGeometry> views(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) { views[i] = make_view(apply_motion(Ps[i], params[i]), tables[i]); });

    const auto pairs = evaluation_pairs(static_cast<int>(n), cfg.pair_stride);
    std::vector<double> terms(pairs.size(), 0.0);
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t k) {
        terms[k] = pair_term(views[static_cast<std::size_t>(pairs[k].first)],
                             views[static_cast<std::size_t>(pairs[k].second)], cfg);
    });
    return terms;
}

double total_cost(std::span<const ProjectionMatrix> Ps, std::span<const RadonDerivativeTable> tables,
                  std::span<const RigidParams> params, const EccConfig& cfg)
{
    double sum = 0.0;
    for (double term : pair_costs(Ps, tables, params, cfg))
        sum += term;
    return sum;
}

} // namespace emc
