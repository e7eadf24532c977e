#include "sindy/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sindy {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("not a boolean: " + v);
}

std::string list_to_string(const std::vector<double>& v) {
    std::string out;
    char buf[40];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        if (i) out += ", ";
        out += buf;
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << f.rdbuf();
    return parse_run_config_text(buffer.str(), path);
}

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::vector<std::string> bad_keys;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;

    auto set_key = [&](const std::string& key, const std::string& value) {
        const std::string full = section + "." + key;
        try {
            if (full == "run.experiment") cfg.experiment = value;
            else if (full == "run.method") cfg.method = value;
            else if (full == "run.output_dir") cfg.output_dir = value;
            else if (full == "run.seed") cfg.seed = std::stoull(value);
            else if (full == "data.noise_fraction") cfg.noise_fraction = std::stod(value);
            else if (full == "data.derivatives") cfg.derivatives = value;
            else if (full == "data.dt") cfg.dt_override = std::stod(value);
            else if (full == "data.t_end") cfg.t_end_override = std::stod(value);
            else if (section == "data" && key.rfind("override.", 0) == 0)
                cfg.param_overrides[key.substr(9)] = std::stod(value);
            else if (full == "library.trainable_poly_exponent")
                cfg.library_options.trainable_poly_exponent = parse_bool(value);
            else if (full == "library.include_poly_pow")
                cfg.library_options.include_poly_pow = parse_bool(value);
            else if (full == "library.include_time_power")
                cfg.library_options.include_time_power = parse_bool(value);
            else if (full == "library.include_rational_exp")
                cfg.library_options.include_rational_exp = parse_bool(value);
            else if (full == "fit.epochs") cfg.fit.epochs = std::stol(value);
            else if (full == "fit.learning_rate") cfg.fit.learning_rate = std::stod(value);
            else if (full == "fit.lr_coeffs") cfg.fit.lr_coeffs = std::stod(value);
            else if (full == "fit.lr_nl_params") cfg.fit.lr_nl_params = std::stod(value);
            else if (full == "fit.lr_gamma") cfg.fit.lr_gamma = std::stod(value);
            else if (full == "fit.lr_sparsity") cfg.fit.lr_sparsity = std::stod(value);
            else if (full == "fit.decay_factor") cfg.fit.decay_factor = std::stod(value);
            else if (full == "fit.decay_every") cfg.fit.decay_every = std::stol(value);
            else if (full == "fit.threshold") cfg.fit.threshold = std::stod(value);
            else if (full == "fit.threshold_start") cfg.fit.threshold_start = std::stol(value);
            else if (full == "fit.batch_size") cfg.fit.batch_size = std::stol(value);
            else if (full == "fit.objective") {
                if (value == "joint_min") cfg.fit.objective = ObjectiveMode::joint_min;
                else if (value == "min_max") cfg.fit.objective = ObjectiveMode::min_max;
                else throw std::invalid_argument("objective must be joint_min or min_max");
            } else if (full == "fit.sparsity") {
                if (value == "gamma") cfg.fit.sparsity = SparsityMode::gamma_trainable;
                else if (value == "lambda") cfg.fit.sparsity = SparsityMode::lambda_trainable;
                else throw std::invalid_argument("sparsity must be gamma or lambda");
            } else if (full == "fit.gamma_init_std") cfg.fit.gamma_init_std = std::stod(value);
            else if (full == "fit.sparsity_init") cfg.fit.sparsity_init = std::stod(value);
            else if (full == "fit.record_gamma_history")
                cfg.fit.record_gamma_history = parse_bool(value);
            else if (full == "baseline.stlsq_knob") cfg.stlsq_knob = std::stod(value);
            else if (full == "baseline.max_iter") cfg.stlsq_max_iter = std::stoi(value);
            else if (full == "baseline.poly_exponents") cfg.grids.poly_exponents = parse_list(value);
            else if (full == "baseline.trig_freqs") cfg.grids.trig_freqs = parse_list(value);
            else if (full == "baseline.exp_rates") cfg.grids.exp_rates = parse_list(value);
            else if (full == "baseline.time_exponents")
                cfg.grids.time_exponents = parse_list(value);
            else if (full == "baseline.rational_bandwidths")
                cfg.grids.rational_bandwidths = parse_list(value);
            else if (full == "pde.nx") cfg.pde_nx = std::stoi(value);
            else if (full == "pde.ny") cfg.pde_ny = std::stoi(value);
            else if (full == "pde.x0") cfg.pde_x0 = std::stod(value);
            else if (full == "pde.y0") cfg.pde_y0 = std::stod(value);
            else if (full == "pde.extent") cfg.pde_extent = std::stod(value);
            else if (full == "pde.dt") cfg.pde_dt = std::stod(value);
            else if (full == "pde.t_end") cfg.pde_t_end = std::stod(value);
            else if (full == "pde.snapshot_stride") cfg.pde_snapshot_stride = std::stoi(value);
            else if (full == "pde.snapshot_skip") cfg.pde_snapshot_skip = std::stoi(value);
            else if (full == "pde.kappa") cfg.pde_params.kappa = std::stod(value);
            else if (full == "pde.beta") cfg.pde_params.beta = std::stod(value);
            else if (full == "pde.inv_activation") cfg.pde_params.inv_activation = std::stod(value);
            else if (full == "pde.cooling") cfg.pde_params.cooling = std::stod(value);
            else if (full == "pde.wind_speed") cfg.pde_wind_speed = std::stod(value);
            else if (full == "pde.wind_angle_deg") cfg.pde_wind_angle_deg = std::stod(value);
            else if (full == "pde.front_cx") cfg.pde_params.front_cx = std::stod(value);
            else if (full == "pde.front_cy") cfg.pde_params.front_cy = std::stod(value);
            else if (full == "pde.front_side") cfg.pde_params.front_side = std::stod(value);
            else if (full == "pde.front_temp") cfg.pde_params.front_temp = std::stod(value);
            else bad_keys.push_back(full);
        } catch (const std::exception& e) {
            bad_keys.push_back(full + " (" + e.what() + ")");
        }
    };

    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": key outside any [section]: " + key);
        set_key(key, value);
    }

    if (!bad_keys.empty()) {
        std::string msg = origin + ": unknown or invalid keys:";
        for (const auto& k : bad_keys) msg += " " + k;
        throw ConfigError(msg, bad_keys);
    }
    cfg.pde_params.wind_x = cfg.pde_wind_speed * std::cos(cfg.pde_wind_angle_deg * M_PI / 180.0);
    cfg.pde_params.wind_y = cfg.pde_wind_speed * std::sin(cfg.pde_wind_angle_deg * M_PI / 180.0);
    return cfg;
}

void RunConfig::validate() const {
    const auto names = benchmark_names();
    const bool is_benchmark = std::find(names.begin(), names.end(), experiment) != names.end();
    if (!is_benchmark && experiment != "wildfire")
        throw ConfigError("run.experiment must be a benchmark name or 'wildfire', got '" +
                          experiment + "'");
    if (method != "adam-sindy" && method != "adam-sindy-divergence" && method != "sindy-w" &&
        method != "sindy-wo")
        throw ConfigError("run.method must be one of adam-sindy, adam-sindy-divergence, "
                          "sindy-w, sindy-wo; got '" +
                          method + "'");
    if (derivatives != "exact" && derivatives != "fd")
        throw ConfigError("data.derivatives must be 'exact' or 'fd'");
    if (noise_fraction < 0.0) throw ConfigError("data.noise_fraction must be >= 0");
    if (method == "adam-sindy" || method == "adam-sindy-divergence") {
        try {
            fit.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("fit section: ") + e.what());
        }
    }
    if (method == "adam-sindy-divergence") {
        if (experiment == "wildfire")
            throw ConfigError("adam-sindy-divergence does not support spatial-derivative "
                              "dictionaries (wildfire)");
    }
    if ((method == "sindy-w" || method == "sindy-wo") && experiment != "wildfire") {
        if (grids.trig_freqs.empty() && grids.exp_rates.empty() && grids.poly_exponents.empty())
            throw ConfigError("baseline method needs at least one non-empty grid");
        if (stlsq_max_iter < 1) throw ConfigError("baseline.max_iter must be >= 1");
    }
    if (experiment == "wildfire") {
        if (pde_nx < 8 || pde_ny < 8) throw ConfigError("pde grid must be at least 8x8");
        if (pde_dt <= 0.0 || pde_t_end <= 0.0) throw ConfigError("pde.dt and pde.t_end must be > 0");
        if (pde_snapshot_stride < 1) throw ConfigError("pde.snapshot_stride must be >= 1");
        if (pde_snapshot_skip < 0) throw ConfigError("pde.snapshot_skip must be >= 0");
    }
}

std::string RunConfig::echo() const {
    std::string out;
    out += "[run]\n";
    out += "experiment = " + experiment + "\n";
    out += "method = " + method + "\n";
    out += "output_dir = " + output_dir + "\n";
    out += "seed = " + std::to_string(seed) + "\n";
    out += "\n[data]\n";
    out += "noise_fraction = " + num(noise_fraction) + "\n";
    out += "derivatives = " + derivatives + "\n";
    if (dt_override) out += "dt = " + num(*dt_override) + "\n";
    if (t_end_override) out += "t_end = " + num(*t_end_override) + "\n";
    for (const auto& [k, v] : param_overrides) out += "override." + k + " = " + num(v) + "\n";
    out += "\n[library]\n";
    out += std::string("trainable_poly_exponent = ") +
           (library_options.trainable_poly_exponent ? "true" : "false") + "\n";
    out += std::string("include_poly_pow = ") +
           (library_options.include_poly_pow ? "true" : "false") + "\n";
    out += std::string("include_time_power = ") +
           (library_options.include_time_power ? "true" : "false") + "\n";
    out += std::string("include_rational_exp = ") +
           (library_options.include_rational_exp ? "true" : "false") + "\n";
    out += "\n[fit]\n";
    out += "epochs = " + std::to_string(fit.epochs) + "\n";
    out += "learning_rate = " + num(fit.learning_rate) + "\n";
    if (fit.lr_coeffs > 0) out += "lr_coeffs = " + num(fit.lr_coeffs) + "\n";
    if (fit.lr_nl_params > 0) out += "lr_nl_params = " + num(fit.lr_nl_params) + "\n";
    if (fit.lr_gamma > 0) out += "lr_gamma = " + num(fit.lr_gamma) + "\n";
    if (fit.lr_sparsity > 0) out += "lr_sparsity = " + num(fit.lr_sparsity) + "\n";
    out += "decay_factor = " + num(fit.decay_factor) + "\n";
    out += "decay_every = " + std::to_string(fit.decay_every) + "\n";
    out += "threshold = " + num(fit.threshold) + "\n";
    out += "threshold_start = " + std::to_string(fit.threshold_start) + "\n";
    out += "batch_size = " + std::to_string(fit.batch_size) + "\n";
    out += std::string("objective = ") +
           (fit.objective == ObjectiveMode::joint_min ? "joint_min" : "min_max") + "\n";
    out += std::string("sparsity = ") +
           (fit.sparsity == SparsityMode::gamma_trainable ? "gamma" : "lambda") + "\n";
    out += "gamma_init_std = " + num(fit.gamma_init_std) + "\n";
    out += "sparsity_init = " + num(fit.sparsity_init) + "\n";
    out += std::string("record_gamma_history = ") + (fit.record_gamma_history ? "true" : "false") +
           "\n";
    out += "\n[baseline]\n";
    out += "stlsq_knob = " + num(stlsq_knob) + "\n";
    out += "max_iter = " + std::to_string(stlsq_max_iter) + "\n";
    out += "poly_exponents = " + list_to_string(grids.poly_exponents) + "\n";
    out += "trig_freqs = " + list_to_string(grids.trig_freqs) + "\n";
    out += "exp_rates = " + list_to_string(grids.exp_rates) + "\n";
    out += "time_exponents = " + list_to_string(grids.time_exponents) + "\n";
    out += "rational_bandwidths = " + list_to_string(grids.rational_bandwidths) + "\n";
    if (experiment == "wildfire") {
        out += "\n[pde]\n";
        out += "nx = " + std::to_string(pde_nx) + "\n";
        out += "ny = " + std::to_string(pde_ny) + "\n";
        out += "x0 = " + num(pde_x0) + "\n";
        out += "y0 = " + num(pde_y0) + "\n";
        out += "extent = " + num(pde_extent) + "\n";
        out += "dt = " + num(pde_dt) + "\n";
        out += "t_end = " + num(pde_t_end) + "\n";
        out += "snapshot_stride = " + std::to_string(pde_snapshot_stride) + "\n";
        out += "snapshot_skip = " + std::to_string(pde_snapshot_skip) + "\n";
        out += "kappa = " + num(pde_params.kappa) + "\n";
        out += "beta = " + num(pde_params.beta) + "\n";
        out += "inv_activation = " + num(pde_params.inv_activation) + "\n";
        out += "cooling = " + num(pde_params.cooling) + "\n";
        out += "wind_speed = " + num(pde_wind_speed) + "\n";
        out += "wind_angle_deg = " + num(pde_wind_angle_deg) + "\n";
        out += "front_cx = " + num(pde_params.front_cx) + "\n";
        out += "front_cy = " + num(pde_params.front_cy) + "\n";
        out += "front_side = " + num(pde_params.front_side) + "\n";
        out += "front_temp = " + num(pde_params.front_temp) + "\n";
    }
    return out;
}

}  // namespace sindy
