#pragma once

#include "emc/config.hpp"
#include "emc/ecc.hpp"
#include "emc/metrics.hpp"
#include "emc/optimizer.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace emc {

/// Everything cmd_simulate writes, loaded back.
struct Dataset {
    ExperimentConfig config;
    ScanGeometry geometry;  ///< effective (downsampled) geometry
    std::vector<ProjectionMatrix> clean;
    std::vector<ProjectionMatrix> motion;
    MotionSpline gt;
    std::vector<ProjectionImage> images;
};

Dataset load_dataset(const std::filesystem::path& dir);

void save_matrices(const std::filesystem::path& path, std::span<const ProjectionMatrix> Ps);
std::vector<ProjectionMatrix> load_matrices(const std::filesystem::path& path);
void save_spline(const std::filesystem::path& path, const MotionSpline& s, std::optional<Scenario> scenario = {});
MotionSpline load_spline(const std::filesystem::path& path);

/// Renders the clean projections, draws the motion spline and writes the dataset.
void cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int threads = 1);

struct CompensateOptions {
    std::optional<Scenario> scenario;  ///< must match the dataset config when set
    std::optional<int> max_iter;
    int threads = 1;
    bool timing = true;  ///< false writes elapsed_ms = 0 so logs are reproducible byte for byte
};

struct CompensateResult {
    MotionSpline estimate;  ///< estimated motion; the correction applied is its per-view inverse
    OptimizerResult optimizer;
    int dimension = 0;
    double initial_cost = 0.0;
};

/// ECC cost of the corrupted geometry after undoing `estimate`.
struct CompensationProblem {
    std::vector<ProjectionMatrix> motion;
    std::vector<RadonDerivativeTable> tables;
    EccConfig ecc;
    ScenarioMask mask;
    MotionSpline templ;  ///< node layout; inactive rows stay zero

    static CompensationProblem from_dataset(const Dataset& ds, int threads);
    std::vector<RigidParams> corrections(const MotionSpline& estimate) const;
    double cost(std::span<const double> packed) const;
};

/// Recovered matrices P_motion * T(estimate_i)^-1.
std::vector<ProjectionMatrix> recover_matrices(std::span<const ProjectionMatrix> motion, const MotionSpline& estimate);

CompensateResult cmd_compensate(const std::filesystem::path& dataset, const CompensateOptions& opts);

enum class GeometryKind { Original, Motion, Recovered };
GeometryKind parse_geometry_kind(std::string_view name);
std::string_view geometry_kind_name(GeometryKind k);

/// Writes volume_<which>.raw/.json and, if requested, slice_<which>.png.
Volume cmd_reconstruct(const std::filesystem::path& dataset, GeometryKind which, bool png, int threads = 1);

struct ReportRow {
    std::string metric;
    std::optional<double> before;
    std::optional<double> after;
};

/// MSE and SSIM of the motion and recovered volumes against the original one, then
/// the six L1 rows. Writes report.csv.
std::vector<ReportRow> cmd_evaluate(const std::filesystem::path& dataset);
std::string format_report(const std::vector<ReportRow>& rows);

} // namespace emc
