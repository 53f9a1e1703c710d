#pragma once

#include "emc/motion_model.hpp"
#include "emc/reconstruction.hpp"
#include "emc/simulation.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace emc {

/// One experiment: acquisition, phantom, motion and processing settings.
/// Text form is `key = value` per line; `#` starts a comment.
struct ExperimentConfig {
    ScanGeometry acquisition;
    int view_stride = 1;
    int pixel_binning = 1;
    int detector_supersample = 4;

    std::string phantom = "tibia-like";
    std::uint64_t seed = 7;
    int spline_nodes = 9;
    double amplitude_translation_um = 50.0;
    double amplitude_rotation_deg = 1.0;
    Scenario scenario = Scenario::OutOfPlane;

    int n_alpha = kDefaultNAlpha;
    int n_t = 0;  ///< 0: default_n_t of the detector
    double kappa_step_deg = 0.1;
    int pair_stride = 1;
    int max_iter = 0;  ///< 0: 1000 for oop and ip, 2000 for full

    int grid_nx = 64;
    int grid_ny = 64;
    int grid_nz = 80;
    double grid_spacing_mm = 0.2;
    RampWindow window = RampWindow::RamLak;

    /// Geometry after view striding and pixel binning; this is what the dataset holds.
    ScanGeometry effective() const;
    int default_max_iter() const;
    Volume grid() const;

    /// Throws ValidationError on inconsistent settings.
    void validate() const;

    /// Canonical text form listing every key; parse_config(to_text()) reproduces *this.
    std::string to_text() const;
};

/// Throws ValidationError with `source:line:` prefixed messages.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace emc
