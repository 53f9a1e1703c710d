#include "emc/motion_model.hpp"

#include "emc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace emc {

ScenarioMask ScenarioMask::out_of_plane()
{
    return {{false, false, true, true, true, false}};
}

ScenarioMask ScenarioMask::in_plane()
{
    return {{true, true, false, false, false, true}};
}

ScenarioMask ScenarioMask::full()
{
    return {{true, true, true, true, true, true}};
}

int ScenarioMask::count() const
{
    return static_cast<int>(std::count(active.begin(), active.end(), true));
}

Scenario parse_scenario(std::string_view name)
{
    if (name == "oop")
        return Scenario::OutOfPlane;
    if (name == "ip")
        return Scenario::InPlane;
    if (name == "full")
        return Scenario::Full;
    throw ValidationError("unknown scenario '" + std::string(name) + "', expected one of {oop, ip, full}");
}

std::string_view scenario_name(Scenario s)
{
    switch (s) {
    case Scenario::OutOfPlane: return "oop";
    case Scenario::InPlane: return "ip";
    case Scenario::Full: break;
    }
    return "full";
}

ScenarioMask mask_for(Scenario s)
{
    switch (s) {
    case Scenario::OutOfPlane: return ScenarioMask::out_of_plane();
    case Scenario::InPlane: return ScenarioMask::in_plane();
    case Scenario::Full: break;
    }
    return ScenarioMask::full();
}

AkimaSpline::AkimaSpline(std::span<const double> xs, std::span<const double> ys)
    : xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end())
{
    const std::size_t n = xs_.size();
    if (n != ys_.size())
        throw LengthMismatch("spline abscissae and ordinates differ in length");
    if (n < 2)
        throw LengthMismatch("spline needs at least two nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(xs_[i + 1] > xs_[i]))
            throw NonMonotonicNodes("spline nodes must be strictly increasing");

    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs_[i + 1] - xs_[i];
        m[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }

    slopes_.assign(n, 0.0);
    if (n == 2) {
        slopes_[0] = slopes_[1] = m[0];
        return;
    }
    if (n < 5) {
        // Derivatives of the local interpolating parabolas.
        slopes_[0] = ((2.0 * h[0] + h[1]) * m[0] - h[0] * m[1]) / (h[0] + h[1]);
        for (std::size_t i = 1; i + 1 < n; ++i)
            slopes_[i] = (h[i] * m[i - 1] + h[i - 1] * m[i]) / (h[i - 1] + h[i]);
        const std::size_t k = n - 2;
        slopes_[n - 1] = ((2.0 * h[k] + h[k - 1]) * m[k] - h[k] * m[k - 1]) / (h[k] + h[k - 1]);
        return;
    }

    // Secants padded with two extrapolated slopes at each end; ext[i + 2] = m_i.
    std::vector<double> ext(n + 3);
    std::copy(m.begin(), m.end(), ext.begin() + 2);
    ext[1] = 2.0 * ext[2] - ext[3];
    ext[0] = 2.0 * ext[1] - ext[2];
    ext[n + 1] = 2.0 * ext[n] - ext[n - 1];
    ext[n + 2] = 2.0 * ext[n + 1] - ext[n];

    for (std::size_t i = 0; i < n; ++i) {
        const double m_prev2 = ext[i];
        const double m_prev = ext[i + 1];
        const double m_next = ext[i + 2];
        const double m_next2 = ext[i + 3];
        const double w_prev = std::abs(m_next2 - m_next);
        const double w_next = std::abs(m_prev - m_prev2);
        const double w = w_prev + w_next;
        slopes_[i] = (w == 0.0) ? 0.5 * (m_prev + m_next) : (w_prev * m_prev + w_next * m_next) / w;
    }
}

double AkimaSpline::operator()(double q) const
{
    if (!(q >= xs_.front() && q <= xs_.back()))
        throw OutOfDomain("spline query " + std::to_string(q) + " outside node range");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), q);
    std::size_t k = static_cast<std::size_t>(std::distance(xs_.begin(), it));
    k = std::min(k == 0 ? 0 : k - 1, xs_.size() - 2);

    const double h = xs_[k + 1] - xs_[k];
    const double s = (q - xs_[k]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * ys_[k] + (s3 - 2.0 * s2 + s) * h * slopes_[k] +
           (-2.0 * s3 + 3.0 * s2) * ys_[k + 1] + (s3 - s2) * h * slopes_[k + 1];
}

double akima_eval(std::span<const double> xs, std::span<const double> ys, double q)
{
    return AkimaSpline(xs, ys)(q);
}

MotionSpline MotionSpline::uniform(int n_nodes, int n_projections)
{
    if (n_nodes < 2)
        throw LengthMismatch("motion spline needs at least two nodes");
    if (n_projections < 2)
        throw LengthMismatch("motion spline needs at least two projections");
    MotionSpline s;
    s.node_indices.resize(static_cast<std::size_t>(n_nodes));
    const double last = n_projections - 1;
    for (int k = 0; k < n_nodes; ++k)
        s.node_indices[static_cast<std::size_t>(k)] = last * k / (n_nodes - 1);
    s.node_indices.back() = last;
    for (auto& row : s.node_values)
        row.assign(static_cast<std::size_t>(n_nodes), 0.0);
    return s;
}

void MotionSpline::validate(int n_projections) const
{
    const std::size_t m = node_indices.size();
    if (m < 2)
        throw LengthMismatch("motion spline needs at least two nodes");
    for (const auto& row : node_values)
        if (row.size() != m)
            throw LengthMismatch("motion spline rows must have one value per node");
    for (std::size_t i = 0; i + 1 < m; ++i)
        if (!(node_indices[i + 1] > node_indices[i]))
            throw NonMonotonicNodes("motion spline nodes must be strictly increasing");
    if (node_indices.front() != 0.0 || node_indices.back() != static_cast<double>(n_projections - 1))
        throw OutOfDomain("motion spline nodes must span [0, " + std::to_string(n_projections - 1) + "]");
}

std::vector<RigidParams> expand(const MotionSpline& spline, int n_projections)
{
    spline.validate(n_projections);
    std::vector<RigidParams> out(static_cast<std::size_t>(n_projections));
    for (std::size_t r = 0; r < 6; ++r) {
        const auto& row = spline.node_values[r];
        if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; }))
            continue;
        const AkimaSpline curve(spline.node_indices, row);
        for (int i = 0; i < n_projections; ++i)
            out[static_cast<std::size_t>(i)][r] = curve(static_cast<double>(i));
    }
    return out;
}

std::vector<double> pack(const ScenarioMask& mask, const MotionSpline& spline)
{
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(mask.count()) * spline.node_indices.size());
    for (std::size_t r = 0; r < 6; ++r)
        if (mask.active[r])
            x.insert(x.end(), spline.node_values[r].begin(), spline.node_values[r].end());
    return x;
}

void unpack(const ScenarioMask& mask, std::span<const double> values, MotionSpline& spline)
{
    const std::size_t m = spline.node_indices.size();
    if (values.size() != static_cast<std::size_t>(mask.count()) * m)
        throw LengthMismatch("packed vector has " + std::to_string(values.size()) + " entries, expected " +
                             std::to_string(static_cast<std::size_t>(mask.count()) * m));
    std::size_t k = 0;
    for (std::size_t r = 0; r < 6; ++r) {
        if (!mask.active[r])
            continue;
        spline.node_values[r].assign(values.begin() + static_cast<std::ptrdiff_t>(k),
                                     values.begin() + static_cast<std::ptrdiff_t>(k + m));
        k += m;
    }
}

} // namespace emc
