#include "emc/config.hpp"

#include "emc/errors.hpp"
#include "emc/io.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace emc {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size())
        throw ValidationError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    return value;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

struct Field {
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field number_field(std::string_view key, T ExperimentConfig::*member, T min_value)
{
    return {[key, member, min_value](ExperimentConfig& c, std::string_view v) {
                const T x = parse_number<T>(key, v);
                if (!(x >= min_value))
                    throw ValidationError(std::string(key) + ": must be at least " +
                                          (std::is_floating_point_v<T> ? format_double(static_cast<double>(min_value))
                                                                       : std::to_string(min_value)));
                c.*member = x;
            },
            [member](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.*member);
                else
                    return std::to_string(c.*member);
            }};
}

template <typename T>
Field geometry_field(std::string_view key, T ScanGeometry::*member, T min_value)
{
    return {[key, member, min_value](ExperimentConfig& c, std::string_view v) {
                const T x = parse_number<T>(key, v);
                if (!(x >= min_value))
                    throw ValidationError(std::string(key) + ": must be positive");
                c.acquisition.*member = x;
            },
            [member](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.acquisition.*member);
                else
                    return std::to_string(c.acquisition.*member);
            }};
}

// Ordered so to_text groups related keys.
const std::vector<std::pair<std::string, Field>>& fields()
{
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        constexpr double tiny = 1e-300;
        t.emplace_back("n_projections", geometry_field("n_projections", &ScanGeometry::n_projections, 2));
        t.emplace_back("angular_range_deg", geometry_field("angular_range_deg", &ScanGeometry::angular_range_deg, tiny));
        t.emplace_back("source_isocenter_mm",
                       geometry_field("source_isocenter_mm", &ScanGeometry::source_isocenter_mm, tiny));
        t.emplace_back("source_detector_mm",
                       geometry_field("source_detector_mm", &ScanGeometry::source_detector_mm, tiny));
        t.emplace_back("detector_rows", geometry_field("detector_rows", &ScanGeometry::detector_rows, 1));
        t.emplace_back("detector_cols", geometry_field("detector_cols", &ScanGeometry::detector_cols, 1));
        t.emplace_back("pixel_pitch_mm", geometry_field("pixel_pitch_mm", &ScanGeometry::pixel_pitch_mm, tiny));
        t.emplace_back("view_stride", number_field("view_stride", &ExperimentConfig::view_stride, 1));
        t.emplace_back("pixel_binning", number_field("pixel_binning", &ExperimentConfig::pixel_binning, 1));
        t.emplace_back("detector_supersample",
                       number_field("detector_supersample", &ExperimentConfig::detector_supersample, 1));
        t.emplace_back("phantom", Field{[](ExperimentConfig& c, std::string_view v) {
                                            try {
                                                make_phantom(v);
                                            } catch (const UnknownPreset& e) {
                                                throw ValidationError(std::string("phantom: ") + e.what());
                                            }
                                            c.phantom = std::string(v);
                                        },
                                        [](const ExperimentConfig& c) { return c.phantom; }});
        t.emplace_back("seed", number_field<std::uint64_t>("seed", &ExperimentConfig::seed, 0));
        t.emplace_back("spline_nodes", number_field("spline_nodes", &ExperimentConfig::spline_nodes, 2));
        t.emplace_back("amplitude_translation_um",
                       number_field("amplitude_translation_um", &ExperimentConfig::amplitude_translation_um, 0.0));
        t.emplace_back("amplitude_rotation_deg",
                       number_field("amplitude_rotation_deg", &ExperimentConfig::amplitude_rotation_deg, 0.0));
        t.emplace_back("scenario", Field{[](ExperimentConfig& c, std::string_view v) {
                                             try {
                                                 c.scenario = parse_scenario(v);
                                             } catch (const ValidationError& e) {
                                                 throw ValidationError(std::string("scenario: ") + e.what());
                                             }
                                         },
                                         [](const ExperimentConfig& c) { return std::string(scenario_name(c.scenario)); }});
        t.emplace_back("n_alpha", number_field("n_alpha", &ExperimentConfig::n_alpha, 2));
        t.emplace_back("n_t", number_field("n_t", &ExperimentConfig::n_t, 0));
        t.emplace_back("kappa_step_deg", number_field("kappa_step_deg", &ExperimentConfig::kappa_step_deg, tiny));
        t.emplace_back("pair_stride", number_field("pair_stride", &ExperimentConfig::pair_stride, 1));
        t.emplace_back("max_iter", number_field("max_iter", &ExperimentConfig::max_iter, 0));
        t.emplace_back("grid_nx", number_field("grid_nx", &ExperimentConfig::grid_nx, 1));
        t.emplace_back("grid_ny", number_field("grid_ny", &ExperimentConfig::grid_ny, 1));
        t.emplace_back("grid_nz", number_field("grid_nz", &ExperimentConfig::grid_nz, 1));
        t.emplace_back("grid_spacing_mm", number_field("grid_spacing_mm", &ExperimentConfig::grid_spacing_mm, tiny));
        t.emplace_back("ramp_window", Field{[](ExperimentConfig& c, std::string_view v) {
                                                if (v == "ram-lak")
                                                    c.window = RampWindow::RamLak;
                                                else if (v == "hann")
                                                    c.window = RampWindow::Hann;
                                                else
                                                    throw ValidationError("ramp_window: expected ram-lak or hann, got '" +
                                                                          std::string(v) + "'");
                                            },
                                            [](const ExperimentConfig& c) {
                                                return std::string(c.window == RampWindow::Hann ? "hann" : "ram-lak");
                                            }});
        return t;
    }();
    return table;
}

const Field* find_field(std::string_view key)
{
    for (const auto& [name, field] : fields())
        if (name == key)
            return &field;
    return nullptr;
}

} // namespace

ScanGeometry ExperimentConfig::effective() const
{
    ScanGeometry g = acquisition;
    g.n_projections = (acquisition.n_projections - 1) / view_stride + 1;
    g.detector_rows = acquisition.detector_rows / pixel_binning;
    g.detector_cols = acquisition.detector_cols / pixel_binning;
    g.pixel_pitch_mm = acquisition.pixel_pitch_mm * pixel_binning;
    return g;
}

int ExperimentConfig::default_max_iter() const
{
    if (max_iter > 0)
        return max_iter;
    return scenario == Scenario::Full ? 2000 : 1000;
}

Volume ExperimentConfig::grid() const
{
    return Volume::centered(grid_nx, grid_ny, grid_nz, grid_spacing_mm);
}

void ExperimentConfig::validate() const
{
    if ((acquisition.n_projections - 1) % view_stride != 0)
        throw ValidationError("view_stride: " + std::to_string(view_stride) + " does not divide n_projections - 1 = " +
                              std::to_string(acquisition.n_projections - 1));
    if (acquisition.detector_rows % pixel_binning != 0 || acquisition.detector_cols % pixel_binning != 0)
        throw ValidationError("pixel_binning: " + std::to_string(pixel_binning) + " does not divide the " +
                              std::to_string(acquisition.detector_cols) + "x" +
                              std::to_string(acquisition.detector_rows) + " detector");
    try {
        acquisition.validate();
        effective().validate();
    } catch (const InvalidGeometry& e) {
        throw ValidationError(std::string("angular_range_deg: ") + e.what());
    }
    if (spline_nodes > effective().n_projections)
        throw ValidationError("spline_nodes: more nodes than projections");
    if (n_t != 0 && (n_t < 3 || n_t % 2 == 0))
        throw ValidationError("n_t: must be 0 (automatic) or an odd number >= 3");
}

std::string ExperimentConfig::to_text() const
{
    std::string out;
    for (const auto& [name, field] : fields())
        out += name + " = " + field.get(*this) + "\n";
    return out;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source)
{
    ExperimentConfig cfg;
    std::map<std::string, int, std::less<>> lines;
    const std::string prefix(source);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = prefix + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(where + "expected 'key = value', got '" + std::string(line) + "'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const Field* field = find_field(key);
        if (!field)
            throw ValidationError(where + "unknown key '" + std::string(key) + "'");
        if (lines.count(key))
            throw ValidationError(where + "duplicate key '" + std::string(key) + "' (first set on line " +
                                  std::to_string(lines.find(key)->second) + ")");
        if (value.empty())
            throw ValidationError(where + std::string(key) + ": missing value");
        try {
            field->set(cfg, value);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
        lines.emplace(std::string(key), line_no);
    }
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(':');
        const auto it = colon == std::string::npos ? lines.end() : lines.find(msg.substr(0, colon));
        if (it != lines.end())
            throw ValidationError(prefix + ":" + std::to_string(it->second) + ": " + msg);
        throw ValidationError(prefix + ": " + msg);
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    io::require_file(path, "config file");
    return parse_config(io::read_text(path), path.string());
}

} // namespace emc
