#include "emc/ecc.hpp"
#include "emc/errors.hpp"
#include "emc/pipeline.hpp"
#include "emc/version.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <numbers>
#include <string>

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::string shape_text(const Array& a)
{
    std::string s = "(";
    for (py::ssize_t d = 0; d < a.ndim(); ++d)
        s += (d ? ", " : "") + std::to_string(a.shape(d));
    return s + (a.ndim() == 1 ? ",)" : ")");
}

void require_shape(const Array& a, const char* name, std::initializer_list<py::ssize_t> dims, const char* expected)
{
    bool ok = a.ndim() == static_cast<py::ssize_t>(dims.size());
    py::ssize_t d = 0;
    for (py::ssize_t want : dims) {
        if (ok && want >= 0 && a.shape(d) != want)
            ok = false;
        ++d;
    }
    if (!ok)
        throw emc::ValidationError(std::string(name) + " must have shape " + expected + ", got " + shape_text(a));
}

double total_cost(const Array& matrices, const Array& images, const Array& params, int n_alpha, int n_t,
                  double kappa_step_deg, int pair_stride, int threads)
{
    require_shape(matrices, "matrices", {-1, 3, 4}, "(N, 3, 4)");
    const py::ssize_t n = matrices.shape(0);
    require_shape(images, "images", {n, -1, -1}, "(N, H, W) with N matching matrices");
    require_shape(params, "params", {n, 6}, "(N, 6) with N matching matrices");
    if (n < 2)
        throw emc::ValidationError("need at least two projections, got " + std::to_string(n));

    // Copy everything before releasing the interpreter lock.
    const int h = static_cast<int>(images.shape(1));
    const int w = static_cast<int>(images.shape(2));
    std::vector<emc::ProjectionMatrix> Ps(static_cast<std::size_t>(n));
    std::vector<emc::ProjectionImage> imgs(static_cast<std::size_t>(n));
    std::vector<emc::RigidParams> ps(static_cast<std::size_t>(n));
    const auto M = matrices.unchecked<3>();
    const auto I = images.unchecked<3>();
    const auto Q = params.unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
        auto& P = Ps[static_cast<std::size_t>(i)];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c)
                P(r, c) = M(i, r, c);
        auto& img = imgs[static_cast<std::size_t>(i)];
        img = emc::ProjectionImage(w, h, 1.0);
        for (int v = 0; v < h; ++v)
            for (int u = 0; u < w; ++u)
                img.at(u, v) = I(i, v, u);
        for (std::size_t k = 0; k < 6; ++k)
            ps[static_cast<std::size_t>(i)][k] = Q(i, static_cast<py::ssize_t>(k));
    }

    py::gil_scoped_release release;
    emc::EccConfig cfg;
    cfg.kappa_step = kappa_step_deg * std::numbers::pi / 180.0;
    cfg.pair_stride = pair_stride;
    cfg.threads = threads;
    cfg.validate();
    const int nt = n_t > 0 ? n_t : emc::default_n_t(w, h);
    const auto tables = emc::prepare_tables(imgs, Ps, n_alpha, nt, threads);
    return emc::total_cost(Ps, tables, ps, cfg);
}

py::dict compensate(const std::filesystem::path& dataset, std::optional<std::string> scenario,
                    std::optional<int> max_iter, int threads, bool timing)
{
    emc::CompensateOptions opts;
    if (scenario)
        opts.scenario = emc::parse_scenario(*scenario);
    if (max_iter) {
        if (*max_iter < 1)
            throw emc::ValidationError("max_iter must be positive, got " + std::to_string(*max_iter));
        opts.max_iter = *max_iter;
    }
    opts.threads = threads;
    opts.timing = timing;

    emc::CompensateResult r;
    {
        py::gil_scoped_release release;
        r = emc::cmd_compensate(dataset, opts);
    }

    const auto m = static_cast<py::ssize_t>(r.estimate.node_indices.size());
    Array nodes(m);
    std::copy(r.estimate.node_indices.begin(), r.estimate.node_indices.end(), nodes.mutable_data());
    Array values({py::ssize_t{6}, m});
    auto V = values.mutable_unchecked<2>();
    for (py::ssize_t p = 0; p < 6; ++p)
        for (py::ssize_t k = 0; k < m; ++k)
            V(p, k) = r.estimate.node_values[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
    Array history(static_cast<py::ssize_t>(r.optimizer.history.size()));
    for (std::size_t i = 0; i < r.optimizer.history.size(); ++i)
        history.mutable_data()[i] = r.optimizer.history[i].f;

    py::dict out;
    out["node_indices"] = nodes;
    out["values"] = values;
    out["history"] = history;
    out["initial_cost"] = r.initial_cost;
    out["final_cost"] = r.optimizer.f_best;
    out["dimension"] = r.dimension;
    out["iterations"] = r.optimizer.iterations;
    out["stop_reason"] = r.optimizer.stop_reason;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Epipolar-consistency cost evaluation and rigid motion compensation.";
    m.attr("__version__") = std::string(emc::version());

    static py::exception<emc::ValidationError> validation(m, "ValidationError", PyExc_ValueError);
    static py::exception<emc::Error> error(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const emc::ValidationError& e) {
            py::set_error(validation, e.what());
        } catch (const emc::Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("total_cost", &total_cost, py::arg("matrices"), py::arg("images"), py::arg("params"),
          py::arg("n_alpha") = emc::kDefaultNAlpha, py::arg("n_t") = 0, py::arg("kappa_step_deg") = 0.1,
          py::arg("pair_stride") = 1, py::arg("threads") = 1,
          "ECC cost of (N, 3, 4) matrices with (N, H, W) images after applying (N, 6) rigid parameters\n"
          "(mm, deg). Images are cosine weighted with their own matrices before the Radon tables are built.");
    m.def("compensate", &compensate, py::arg("dataset"), py::arg("scenario") = py::none(),
          py::arg("max_iter") = py::none(), py::arg("threads") = 1, py::arg("timing") = true,
          "Run the compensation on a simulated dataset directory. Writes the same files as the CLI and\n"
          "returns the estimated spline (node_indices, values as 6 x M in mm/deg) and the cost history.");
}
