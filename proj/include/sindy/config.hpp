#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sindy/baseline.hpp"
#include "sindy/engine.hpp"
#include "sindy/pde.hpp"

namespace sindy {

/// Thrown by the config parser with every offending key collected, not
/// just the first one.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::vector<std::string> bad_keys = {})
        : std::runtime_error(what), bad_keys_(std::move(bad_keys)) {}
    const std::vector<std::string>& bad_keys() const { return bad_keys_; }

private:
    std::vector<std::string> bad_keys_;
};

/// Everything one experiment run needs, parsed from a sectioned key-value
/// file. Sections: [run], [data], [library], [fit], [baseline], [pde].
struct RunConfig {
    // [run]
    std::string experiment;  // benchmark name or "wildfire"
    std::string method;      // adam-sindy | adam-sindy-divergence | sindy-w | sindy-wo
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    // [data]
    double noise_fraction = 0.0;
    std::string derivatives = "exact";  // exact | fd
    std::optional<double> dt_override;
    std::optional<double> t_end_override;
    std::map<std::string, double> param_overrides;

    // [library]
    MasterLibraryOptions library_options;

    // [fit]
    FitConfig fit;

    // [baseline]
    double stlsq_knob = 0.01;
    int stlsq_max_iter = 20;
    BaselineGrids grids;

    // [pde]
    int pde_nx = 64, pde_ny = 64;
    double pde_x0 = 0.0, pde_y0 = 0.0;
    double pde_extent = 16.0;
    double pde_dt = 0.004;
    double pde_t_end = 0.08;
    int pde_snapshot_stride = 1;
    int pde_snapshot_skip = 0;
    WildfireParams pde_params;
    double pde_wind_speed = 10.0;
    double pde_wind_angle_deg = 45.0;

    /// Validates cross-field constraints for the chosen method/experiment.
    void validate() const;

    /// The effective configuration as a parseable config file.
    std::string echo() const;
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin = "<memory>");

}  // namespace sindy
