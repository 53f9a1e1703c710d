#include "emc/errors.hpp"
#include "emc/io.hpp"
#include "emc/pipeline.hpp"
#include "emc/png_writer.hpp"
#include "emc/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

namespace {

int default_threads()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Epipolar-consistency rigid motion compensation for cone-beam scans"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(emc::version()));
    int threads = default_threads();
    app.add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);

    std::string config_path;
    std::string dataset;

    auto* cfg_cmd = app.add_subcommand("default-config", "Print the default experiment config");

    auto* sim = app.add_subcommand("simulate", "Render a phantom scan and inject random rigid motion");
    sim->add_option("--config", config_path, "key = value config file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sim->add_option("--out", dataset, "Dataset directory to write")->required();

    std::string scenario;
    int max_iter = 0;
    bool no_timing = false;
    auto* comp = app.add_subcommand("compensate", "Estimate the motion spline by minimizing the ECC cost");
    comp->add_option("--dataset", dataset, "Dataset directory")->required();
    comp->add_option("--scenario", scenario, "oop, ip or full; must match the dataset")
        ->check(CLI::IsMember({"oop", "ip", "full"}));
    comp->add_option("--max-iter", max_iter, "Iteration budget (default 1000, or 2000 for full)")
        ->check(CLI::PositiveNumber);
    comp->add_flag("--no-timing", no_timing, "Write elapsed_ms = 0 for reproducible logs");

    std::string which = "original";
    bool png = false;
    auto* rec = app.add_subcommand("reconstruct", "FDK reconstruction with one of the dataset geometries");
    rec->add_option("--dataset", dataset, "Dataset directory")->required();
    rec->add_option("--which", which, "original, motion or recovered")
        ->check(CLI::IsMember({"original", "motion", "recovered"}));
    rec->add_flag("--png", png, "Also write a 16-bit PNG of the off-center axial slice");

    auto* eval = app.add_subcommand("evaluate", "Write report.csv comparing motion and recovered results");
    eval->add_option("--dataset", dataset, "Dataset directory")->required();

    std::string volume_base;
    std::string png_out;
    double offset = 0.25;
    std::optional<double> level;
    std::optional<double> width;
    auto* slice = app.add_subcommand("render-slice", "Write an axial slice of a volume as 16-bit PNG");
    slice->add_option("--volume", volume_base, "Volume path without .raw/.json")->required();
    slice->add_option("--out", png_out, "PNG file")->required();
    slice->add_option("--offset", offset, "Slice offset from the center as a fraction of the half height")
        ->check(CLI::Range(-1.0, 1.0));
    slice->add_option("--level", level, "Window center (default: slice midrange)");
    slice->add_option("--width", width, "Window width (default: slice range)")->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "simulate, compensate, reconstruct all three and evaluate");
    run->add_option("--config", config_path, "key = value config file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    run->add_option("--out", dataset, "Dataset directory to write")->required();
    run->add_flag("--no-timing", no_timing, "Write elapsed_ms = 0 for reproducible logs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        auto load = [&] { return config_path.empty() ? emc::ExperimentConfig{} : emc::load_config(config_path); };
        if (cfg_cmd->parsed()) {
            std::cout << emc::ExperimentConfig{}.to_text();
        } else if (sim->parsed()) {
            emc::cmd_simulate(load(), dataset, threads);
            std::cout << "wrote dataset " << dataset << "\n";
        } else if (comp->parsed()) {
            emc::CompensateOptions opts;
            if (!scenario.empty())
                opts.scenario = emc::parse_scenario(scenario);
            if (max_iter > 0)
                opts.max_iter = max_iter;
            opts.threads = threads;
            opts.timing = !no_timing;
            const auto r = emc::cmd_compensate(dataset, opts);
            std::cout << "dimension " << r.dimension << ", " << r.optimizer.iterations << " iterations ("
                      << r.optimizer.stop_reason << "), cost " << r.initial_cost << " -> " << r.optimizer.f_best
                      << "\n";
        } else if (rec->parsed()) {
            emc::cmd_reconstruct(dataset, emc::parse_geometry_kind(which), png, threads);
            std::cout << "wrote volume_" << which << "\n";
        } else if (eval->parsed()) {
            std::cout << emc::format_report(emc::cmd_evaluate(dataset));
        } else if (slice->parsed()) {
            const emc::Volume v = emc::load_volume(volume_base);
            emc::write_png16(png_out, emc::axial_slice(v, offset, {level, width}));
        } else if (run->parsed()) {
            emc::cmd_simulate(load(), dataset, threads);
            emc::CompensateOptions opts;
            opts.threads = threads;
            opts.timing = !no_timing;
            emc::cmd_compensate(dataset, opts);
            for (auto k : {emc::GeometryKind::Original, emc::GeometryKind::Motion, emc::GeometryKind::Recovered})
                emc::cmd_reconstruct(dataset, k, true, threads);
            std::cout << emc::format_report(emc::cmd_evaluate(dataset));
        }
    } catch (const emc::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
