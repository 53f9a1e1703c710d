#include "emc/pipeline.hpp"

#include "emc/errors.hpp"
#include "emc/io.hpp"
#include "emc/parallel.hpp"
#include "emc/png_writer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace emc {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 6> kParamNames = {"tx", "ty", "tz", "rx", "ry", "rz"};

io::json geometry_json(const ScanGeometry& g)
{
    return {{"n_projections", g.n_projections},
            {"angular_range_deg", g.angular_range_deg},
            {"source_isocenter_mm", g.source_isocenter_mm},
            {"source_detector_mm", g.source_detector_mm},
            {"detector_rows", g.detector_rows},
            {"detector_cols", g.detector_cols},
            {"pixel_pitch_mm", g.pixel_pitch_mm}};
}

fs::path view_path(const fs::path& dir, int i)
{
    char name[32];
    std::snprintf(name, sizeof name, "view_%04d.raw", i);
    return dir / "proj" / name;
}

std::string format_value(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

void save_matrices(const fs::path& path, std::span<const ProjectionMatrix> Ps)
{
    io::json list = io::json::array();
    for (const auto& P : Ps) {
        io::json row = io::json::array();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c)
                row.push_back(P(r, c));
        list.push_back(std::move(row));
    }
    io::write_json(path, {{"layout", "row-major 3x4 per view"}, {"matrices", std::move(list)}});
}

std::vector<ProjectionMatrix> load_matrices(const fs::path& path)
{
    const io::json j = io::read_json(path);
    std::vector<ProjectionMatrix> out;
    try {
        for (const auto& row : j.at("matrices")) {
            if (row.size() != 12)
                throw ValidationError(path.string() + ": every matrix needs 12 entries");
            ProjectionMatrix P;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 4; ++c)
                    P(r, c) = row.at(static_cast<std::size_t>(4 * r + c)).get<double>();
            out.push_back(P);
        }
    } catch (const io::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return out;
}

void save_spline(const fs::path& path, const MotionSpline& s, std::optional<Scenario> scenario)
{
    io::json rows = io::json::array();
    for (std::size_t r = 0; r < 6; ++r) {
        std::vector<double> row = s.node_values[r];
        if (r < 3)
            for (double& v : row)
                v *= 1000.0;
        rows.push_back(std::move(row));
    }
    const int n = s.node_indices.empty() ? 0 : static_cast<int>(std::lround(s.node_indices.back())) + 1;
    io::json j = {{"n_projections", n},
                  {"node_indices", s.node_indices},
                  {"node_values", std::move(rows)},
                  {"parameters", kParamNames},
                  {"units", {{"translation", "um"}, {"rotation", "deg"}}}};
    if (scenario)
        j["scenario"] = std::string(scenario_name(*scenario));
    io::write_json(path, j);
}

MotionSpline load_spline(const fs::path& path)
{
    const io::json j = io::read_json(path);
    MotionSpline s;
    try {
        if (j.at("units").at("translation") != "um" || j.at("units").at("rotation") != "deg")
            throw ValidationError(path.string() + ": units must be {translation: um, rotation: deg}");
        s.node_indices = j.at("node_indices").get<std::vector<double>>();
        const auto& rows = j.at("node_values");
        if (rows.size() != 6)
            throw ValidationError(path.string() + ": node_values needs 6 rows (tx, ty, tz, rx, ry, rz)");
        for (std::size_t r = 0; r < 6; ++r) {
            s.node_values[r] = rows.at(r).get<std::vector<double>>();
            if (r < 3)
                for (double& v : s.node_values[r])
                    v /= 1000.0;
        }
        s.validate(j.at("n_projections").get<int>());
    } catch (const io::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    } catch (const Error& e) {
        if (dynamic_cast<const ValidationError*>(&e))
            throw;
        throw ValidationError(path.string() + ": " + e.what());
    }
    return s;
}

void cmd_simulate(const ExperimentConfig& cfg, const fs::path& out_dir, int threads)
{
    cfg.validate();
    const ScanGeometry g = cfg.effective();
    const auto Ps = short_scan_trajectory(g);
    const Phantom ph = make_phantom(cfg.phantom);
    const int supersample = cfg.detector_supersample * cfg.pixel_binning;

    std::vector<ProjectionImage> images(Ps.size());
    parallel_for(Ps.size(), threads, [&](std::size_t i) {
        images[i] = forward_project(ph, Ps[i], g.detector_rows, g.detector_cols, g.pixel_pitch_mm, supersample);
    });

    const MotionSpline gt =
        random_motion_spline(g.n_projections, cfg.spline_nodes, mask_for(cfg.scenario),
                             cfg.amplitude_translation_um / 1000.0, cfg.amplitude_rotation_deg, cfg.seed);
    const auto motion = inject_motion(Ps, gt);

    fs::create_directories(out_dir / "proj");
    io::json meta = {
        {"geometry", geometry_json(g)},
        {"acquisition", geometry_json(cfg.acquisition)},
        {"view_stride", cfg.view_stride},
        {"pixel_binning", cfg.pixel_binning},
        {"detector_supersample", cfg.detector_supersample},
        {"phantom", cfg.phantom},
        {"seed", cfg.seed},
        {"scenario", std::string(scenario_name(cfg.scenario))},
        {"units", {{"length", "mm"}, {"angle", "deg"}, {"projection", "line integral of density, mm"}}},
        {"projection_files", {{"pattern", "proj/view_%04d.raw"}, {"dtype", "float32-le"}, {"order", "row-major"},
                              {"width", g.detector_cols}, {"height", g.detector_rows}}},
    };
    io::write_json(out_dir / "meta.json", meta);
    io::write_text(out_dir / "config.txt", cfg.to_text());
    save_matrices(out_dir / "geometry.json", Ps);
    save_matrices(out_dir / "geometry_motion.json", motion);
    save_spline(out_dir / "spline_gt.json", gt, cfg.scenario);
    for (std::size_t i = 0; i < images.size(); ++i)
        io::write_f32_le(view_path(out_dir, static_cast<int>(i)), images[i].data);
}

Dataset load_dataset(const fs::path& dir)
{
    for (const char* name : {"config.txt", "meta.json", "geometry.json", "geometry_motion.json", "spline_gt.json"})
        io::require_file(dir / name, std::string("dataset file ") + name + " (run `emc simulate` first)");
    Dataset ds;
    ds.config = load_config(dir / "config.txt");
    ds.geometry = ds.config.effective();
    ds.clean = load_matrices(dir / "geometry.json");
    ds.motion = load_matrices(dir / "geometry_motion.json");
    ds.gt = load_spline(dir / "spline_gt.json");
    const auto n = static_cast<std::size_t>(ds.geometry.n_projections);
    if (ds.clean.size() != n || ds.motion.size() != n)
        throw ValidationError(dir.string() + ": geometry files do not hold " + std::to_string(n) + " matrices");
    ds.images.reserve(n);
    const auto pixels = static_cast<std::size_t>(ds.geometry.detector_rows) * ds.geometry.detector_cols;
    for (std::size_t i = 0; i < n; ++i) {
        ProjectionImage img(ds.geometry.detector_cols, ds.geometry.detector_rows, ds.geometry.pixel_pitch_mm);
        img.data = io::read_f32_le(view_path(dir, static_cast<int>(i)), pixels);
        ds.images.push_back(std::move(img));
    }
    return ds;
}

CompensationProblem CompensationProblem::from_dataset(const Dataset& ds, int threads)
{
    const ExperimentConfig& c = ds.config;
    CompensationProblem p;
    p.motion = ds.motion;
    const int n_t = c.n_t > 0 ? c.n_t : default_n_t(ds.geometry.detector_cols, ds.geometry.detector_rows);
    p.tables = prepare_tables(ds.images, ds.motion, c.n_alpha, n_t, threads);
    p.ecc.kappa_step = c.kappa_step_deg * std::numbers::pi / 180.0;
    p.ecc.pair_stride = c.pair_stride;
    p.ecc.threads = threads;
    p.mask = mask_for(c.scenario);
    p.templ = MotionSpline::uniform(static_cast<int>(ds.gt.node_indices.size()), ds.geometry.n_projections);
    p.templ.node_indices = ds.gt.node_indices;
    return p;
}

std::vector<RigidParams> CompensationProblem::corrections(const MotionSpline& estimate) const
{
    auto params = expand(estimate, static_cast<int>(motion.size()));
    for (auto& q : params)
        q = inverse_params(q);
    return params;
}

double CompensationProblem::cost(std::span<const double> packed) const
{
    MotionSpline s = templ;
    unpack(mask, packed, s);
    return total_cost(motion, tables, corrections(s), ecc);
}

std::vector<ProjectionMatrix> recover_matrices(std::span<const ProjectionMatrix> motion, const MotionSpline& estimate)
{
    const auto params = expand(estimate, static_cast<int>(motion.size()));
    std::vector<ProjectionMatrix> out;
    out.reserve(motion.size());
    for (std::size_t i = 0; i < motion.size(); ++i)
        out.push_back(apply_motion(motion[i], inverse_params(params[i])));
    return out;
}

CompensateResult cmd_compensate(const fs::path& dataset, const CompensateOptions& opts)
{
    const Dataset ds = load_dataset(dataset);
    const ExperimentConfig& c = ds.config;
    if (opts.scenario && *opts.scenario != c.scenario)
        throw ValidationError("scenario mismatch: dataset was simulated with scenario '" +
                              std::string(scenario_name(c.scenario)) + "', requested '" +
                              std::string(scenario_name(*opts.scenario)) + "'");
    const CompensationProblem problem = CompensationProblem::from_dataset(ds, opts.threads);

    OptimizerConfig oc;
    oc.max_iter = opts.max_iter.value_or(c.default_max_iter());
    for (std::size_t r = 0; r < 6; ++r) {
        if (!problem.mask.active[r])
            continue;
        const double amp = r < 3 ? c.amplitude_translation_um / 1000.0 : c.amplitude_rotation_deg;
        for (std::size_t k = 0; k < problem.templ.node_indices.size(); ++k)
            oc.bounds.push_back({-amp, amp});
    }

    CompensateResult result;
    const std::vector<double> x0 = pack(problem.mask, problem.templ);
    result.dimension = static_cast<int>(x0.size());
    result.initial_cost = problem.cost(x0);

    std::ofstream log(dataset / "cost_log.csv", std::ios::binary);
    if (!log)
        throw Error("cannot write " + (dataset / "cost_log.csv").string());
    log << "iteration,cost,elapsed_ms\n" << "0," << format_value(result.initial_cost) << ",0\n";
    const auto start = std::chrono::steady_clock::now();
    oc.on_iteration = [&](const HistoryEntry& h) {
        long long ms = 0;
        if (opts.timing)
            ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                     .count();
        log << h.iteration << "," << format_value(h.f) << "," << ms << "\n";
    };

    result.optimizer = nelder_mead_adaptive([&](std::span<const double> x) { return problem.cost(x); }, x0, oc);
    log.close();

    result.estimate = problem.templ;
    unpack(problem.mask, result.optimizer.x_best, result.estimate);
    save_spline(dataset / "spline_est.json", result.estimate, c.scenario);
    save_matrices(dataset / "geometry_recovered.json", recover_matrices(ds.motion, result.estimate));
    io::write_json(dataset / "compensate.json", {{"scenario", std::string(scenario_name(c.scenario))},
                                                 {"dimension", result.dimension},
                                                 {"max_iter", oc.max_iter},
                                                 {"iterations", result.optimizer.iterations},
                                                 {"evaluations", result.optimizer.evaluations},
                                                 {"stop_reason", result.optimizer.stop_reason},
                                                 {"initial_cost", result.initial_cost},
                                                 {"final_cost", result.optimizer.f_best}});
    return result;
}

GeometryKind parse_geometry_kind(std::string_view name)
{
    if (name == "original")
        return GeometryKind::Original;
    if (name == "motion")
        return GeometryKind::Motion;
    if (name == "recovered")
        return GeometryKind::Recovered;
    throw ValidationError("unknown geometry '" + std::string(name) + "' (expected original, motion or recovered)");
}

std::string_view geometry_kind_name(GeometryKind k)
{
    switch (k) {
    case GeometryKind::Original:
        return "original";
    case GeometryKind::Motion:
        return "motion";
    case GeometryKind::Recovered:
        return "recovered";
    }
    return "original";
}

Volume cmd_reconstruct(const fs::path& dataset, GeometryKind which, bool png, int threads)
{
    if (which == GeometryKind::Recovered)
        io::require_file(dataset / "geometry_recovered.json",
                         "geometry_recovered.json (run `emc compensate` on this dataset first)");
    const Dataset ds = load_dataset(dataset);
    std::vector<ProjectionMatrix> Ps;
    switch (which) {
    case GeometryKind::Original:
        Ps = ds.clean;
        break;
    case GeometryKind::Motion:
        Ps = ds.motion;
        break;
    case GeometryKind::Recovered:
        Ps = load_matrices(dataset / "geometry_recovered.json");
        break;
    }
    FdkOptions fo;
    fo.window = ds.config.window;
    fo.threads = threads;
    const Volume vol = fdk(ds.images, Ps, ds.config.grid(), ds.geometry, fo);
    const std::string name(geometry_kind_name(which));
    save_volume(vol, dataset / ("volume_" + name));
    if (png)
        write_png16(dataset / ("slice_" + name + ".png"), axial_slice(vol));
    return vol;
}

std::vector<ReportRow> cmd_evaluate(const fs::path& dataset)
{
    for (const char* name : {"volume_original.json", "volume_motion.json", "volume_recovered.json"})
        io::require_file(dataset / name, std::string(name) + " (run `emc reconstruct` first)");
    io::require_file(dataset / "spline_est.json", "spline_est.json (run `emc compensate` first)");
    io::require_file(dataset / "spline_gt.json", "spline_gt.json (run `emc simulate` first)");
    const ExperimentConfig cfg = load_config(dataset / "config.txt");
    const int n = cfg.effective().n_projections;
    const Volume gt_vol = load_volume(dataset / "volume_original");
    const Volume motion_vol = load_volume(dataset / "volume_motion");
    const Volume recovered_vol = load_volume(dataset / "volume_recovered");
    const MotionSpline gt = load_spline(dataset / "spline_gt.json");
    const MotionSpline est = load_spline(dataset / "spline_est.json");
    MotionSpline zero = MotionSpline::uniform(static_cast<int>(gt.node_indices.size()), n);
    zero.node_indices = gt.node_indices;

    const ScenarioMask mask = mask_for(cfg.scenario);
    const auto before = param_l1(gt, zero, n, mask);
    const auto after = param_l1(gt, est, n, mask);

    std::vector<ReportRow> rows;
    rows.push_back({"mse", mse(motion_vol, gt_vol), mse(recovered_vol, gt_vol)});
    rows.push_back({"ssim", ssim(motion_vol, gt_vol), ssim(recovered_vol, gt_vol)});
    for (std::size_t r = 0; r < 6; ++r)
        rows.push_back({std::string("l1_") + kParamNames[r] + (r < 3 ? "_um" : "_deg"), before[r], after[r]});

    std::string csv = "metric,before,after\n";
    for (const auto& row : rows)
        csv += row.metric + "," + (row.before ? format_value(*row.before) : "x") + "," +
               (row.after ? format_value(*row.after) : "x") + "\n";
    io::write_text(dataset / "report.csv", csv);
    return rows;
}

std::string format_report(const std::vector<ReportRow>& rows)
{
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-10s %14s    %14s\n", "metric", "before", "after");
    out += line;
    for (const auto& row : rows) {
        const std::string b = row.before ? format_value(*row.before) : "x";
        const std::string a = row.after ? format_value(*row.after) : "x";
        std::snprintf(line, sizeof line, "%-10s %14s -> %14s\n", row.metric.c_str(), b.c_str(), a.c_str());
        out += line;
    }
    return out;
}

} // namespace emc
