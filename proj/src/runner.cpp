#include "sindy/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sindy/dataset.hpp"
#include "sindy/rng.hpp"

namespace sindy {

namespace fs = std::filesystem;

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
        f << content;
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Library + regression problem for the configured experiment. The
// benchmark libraries enable exactly the families the experiment needs.
struct Assembled {
    RegressionProblem problem;
    LibraryInstance lib;
    std::optional<Trajectory> trajectory;
    std::optional<FieldSeries> field;
    std::vector<std::vector<TruthTerm>> truth;  // empty when unknown
    bool support_only_truth = false;
};

MasterLibraryOptions default_options_for(const std::string& experiment,
                                         MasterLibraryOptions opts) {
    if (experiment == "vanderpol") {
        opts.trainable_poly_exponent = true;
        opts.include_poly_pow = true;
    } else if (experiment == "pharma") {
        opts.include_time_power = true;
    }
    return opts;
}

Assembled assemble(const RunConfig& cfg) {
    Assembled a;
    if (cfg.experiment == "wildfire") {
        GridSpec grid;
        grid.nx = cfg.pde_nx;
        grid.ny = cfg.pde_ny;
        grid.x0 = cfg.pde_x0;
        grid.y0 = cfg.pde_y0;
        grid.dx = cfg.pde_extent / (cfg.pde_nx - 1);
        grid.dy = cfg.pde_extent / (cfg.pde_ny - 1);
        FieldSeries series = simulate_wildfire(cfg.pde_params, grid, cfg.pde_dt, cfg.pde_t_end,
                                               cfg.pde_snapshot_stride);
        if (cfg.pde_snapshot_skip > 0) {
            const auto skip = std::min<std::size_t>(
                static_cast<std::size_t>(cfg.pde_snapshot_skip), series.snapshots.size() - 1);
            series.snapshots.erase(series.snapshots.begin(),
                                   series.snapshots.begin() + static_cast<long>(skip));
            series.times.erase(series.times.begin(), series.times.begin() + static_cast<long>(skip));
        }
        a.problem = flatten_for_regression(series);
        a.lib = wildfire_library();
        const WildfireTruth wt = wildfire_truth(cfg.pde_params, grid);
        std::vector<TruthTerm> eq0;
        for (const auto& [col, coeff] : wt.coeffs) {
            const CandidateSpec& spec = a.lib.specs[static_cast<std::size_t>(col)];
            TruthTerm t{spec.family, spec.input, spec.pair, coeff, 1.0, false};
            if (spec.family == Family::rational_exp) {
                t.param = wt.bandwidth;
                t.check_param = true;
            }
            eq0.push_back(t);
        }
        a.truth = {eq0};
        a.support_only_truth = true;  // coefficients checked by sign elsewhere
        a.field = std::move(series);
        return a;
    }

    BenchmarkSystem system = make_benchmark(cfg.experiment, cfg.param_overrides);
    if (cfg.dt_override) {
        system.dt = *cfg.dt_override;
        if (cfg.experiment == "pharma") system.t_start = system.dt;
    }
    if (cfg.t_end_override) system.t_end = *cfg.t_end_override;
    Trajectory traj = integrate(system);
    if (cfg.noise_fraction > 0.0)
        traj = add_noise(traj, cfg.noise_fraction, sub_seed(cfg.seed, "noise"));
    else if (cfg.derivatives == "fd")
        traj.derivatives = derivatives_fd(traj);

    const MasterLibraryOptions opts = default_options_for(cfg.experiment, cfg.library_options);
    a.lib = master_library(static_cast<int>(system.state_count()), opts);
    a.lib.input_names = traj.state_names;
    a.problem = problem_from(traj);
    a.truth = benchmark_truth(system);
    a.trajectory = std::move(traj);
    return a;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "value,support_size,exact_recovery,final_loss\n";
    char buf[120];
    for (const SweepRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g\n", row.value, row.support_size,
                      row.exact_recovery ? 1 : 0, row.residual);
        csv += buf;
    }
    return csv;
}

int count_support(const Matrix& coeffs) {
    int n = 0;
    for (double v : coeffs.flat())
        if (v != 0.0) ++n;
    return n;
}

}  // namespace

RunResult execute_run(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Assembled a = assemble(cfg);

    RunResult result;
    result.trajectory = std::move(a.trajectory);
    result.field = std::move(a.field);
    result.truth_known = !a.truth.empty();

    if (cfg.method == "adam-sindy" || cfg.method == "adam-sindy-divergence") {
        FitConfig fit_cfg = cfg.fit;
        fit_cfg.seed = cfg.seed;
        result.report = cfg.method == "adam-sindy" ? fit(a.problem, a.lib, fit_cfg)
                                                   : fit_divergence(a.problem, a.lib, fit_cfg);
        result.library = a.lib;
        result.library.nl_params = result.report.nl_params;
        result.equations = result.report.equations;
        if (result.truth_known)
            result.exact_recovery = matches_truth(result.library, result.report.coeffs, a.truth,
                                                  a.support_only_truth ? -1.0 : 1e-3, 1e-3);
    } else {
        result.is_baseline = true;
        LibraryInstance fixed = build_fixed_library(a.lib, cfg.grids);
        const Matrix theta = evaluate(fixed, 0, a.problem.inputs, a.problem.t);
        result.baseline = stlsq(theta, a.problem.targets, cfg.stlsq_knob, cfg.stlsq_max_iter);
        result.library = fixed;
        FitReport view;
        view.coeffs = result.baseline.coeffs;
        view.nl_params = fixed.nl_params;
        result.equations = format_equations(view, fixed, a.problem.target_names);
        if (result.truth_known)
            result.exact_recovery = matches_truth(fixed, result.baseline.coeffs, a.truth,
                                                  a.support_only_truth ? -1.0 : 1e-3, 1e-3);
    }
    result.problem = std::move(a.problem);
    result.seconds_total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::string resolve_output_dir(const std::string& configured) {
    fs::path dir(configured);
    if (dir.is_relative()) {
        if (const char* root = std::getenv("SINDY_OUTPUT_ROOT")) dir = fs::path(root) / dir;
    }
    return dir.string();
}

std::string write_run_artifacts(const RunConfig& cfg, const RunResult& result) {
    const fs::path dir = resolve_output_dir(cfg.output_dir);
    fs::create_directories(dir);

    if (result.trajectory) atomic_write(dir / "trajectory.csv", to_csv(*result.trajectory));
    if (result.field) {
        const fs::path tmp = dir / "field.csv";
        // field csv written through the same staged path
        std::string staged = tmp.string() + ".tmp";
        write_field_csv(*result.field, staged);
        fs::rename(staged, tmp);
    }

    std::string eq_text;
    for (const std::string& line : result.equations) eq_text += line + "\n";
    atomic_write(dir / "equations.txt", eq_text);

    char buf[160];
    if (!result.is_baseline) {
        std::string loss_csv = "epoch,loss\n";
        for (std::size_t e = 0; e < result.report.loss_history.size(); ++e) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, result.report.loss_history[e]);
            loss_csv += buf;
        }
        atomic_write(dir / "loss_history.csv", loss_csv);

        std::string gamma_csv = "epoch,candidate_id,abs_gamma\n";
        const Matrix& gh = result.report.gamma_history;
        gamma_csv.reserve(gh.size() * 24 + 32);
        for (std::size_t e = 0; e < gh.rows(); ++e)
            for (std::size_t c = 0; c < gh.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", e, c, gh(e, c));
                gamma_csv += buf;
            }
        atomic_write(dir / "gamma_history.csv", gamma_csv);
    }

    // summary: config echo plus results; no timing so reruns are byte-identical
    std::string summary;
    {
        std::stringstream ss(cfg.echo());
        std::string line, section;
        while (std::getline(ss, line)) {
            if (line.empty()) continue;
            if (line.front() == '[') {
                section = line.substr(1, line.size() - 2);
                continue;
            }
            summary += "config." + section + "." + line + "\n";
        }
    }
    summary += "result.method = " + cfg.method + "\n";
    summary += "result.experiment = " + cfg.experiment + "\n";
    std::snprintf(buf, sizeof buf, "result.support_size = %d\n",
                  count_support(result.is_baseline ? result.baseline.coeffs
                                                   : result.report.coeffs));
    summary += buf;
    if (result.truth_known) {
        summary += std::string("result.exact_recovery = ") +
                   (result.exact_recovery ? "true" : "false") + "\n";
    }
    if (!result.is_baseline) {
        std::snprintf(buf, sizeof buf, "result.final_loss = %.17g\n", result.report.final_loss());
        summary += buf;
        std::snprintf(buf, sizeof buf, "result.epochs_run = %ld\n", result.report.epochs_run);
        summary += buf;
        std::snprintf(buf, sizeof buf, "result.sparsity_knob = %.17g\n",
                      result.report.sparsity_knob);
        summary += buf;
        std::snprintf(buf, sizeof buf, "result.sparsity_clamp_events = %ld\n",
                      result.report.sparsity_clamp_events);
        summary += buf;
        summary += std::string("result.empty_model = ") +
                   (result.report.empty_model ? "true" : "false") + "\n";
        const Matrix& nl = result.report.nl_params;
        for (std::size_t eq = 0; eq < nl.rows(); ++eq)
            for (std::size_t s = 0; s < nl.cols(); ++s) {
                std::snprintf(buf, sizeof buf, "result.nl_param.%zu.%zu = %.17g\n", eq, s,
                              nl(eq, s));
                summary += buf;
            }
        const Matrix& xi = result.report.coeffs;
        for (std::size_t c = 0; c < xi.rows(); ++c)
            for (std::size_t eq = 0; eq < xi.cols(); ++eq)
                if (xi(c, eq) != 0.0) {
                    std::snprintf(buf, sizeof buf, "result.coeff.%zu.%zu = %.17g\n", c, eq,
                                  xi(c, eq));
                    summary += buf;
                }
    } else {
        summary += std::string("result.rank_deficient = ") +
                   (result.baseline.rank_deficient ? "true" : "false") + "\n";
        std::snprintf(buf, sizeof buf, "result.stlsq_iterations = %d\n",
                      result.baseline.iterations);
        summary += buf;
        const Matrix& xi = result.baseline.coeffs;
        for (std::size_t c = 0; c < xi.rows(); ++c)
            for (std::size_t eq = 0; eq < xi.cols(); ++eq)
                if (xi(c, eq) != 0.0) {
                    std::snprintf(buf, sizeof buf, "result.coeff.%zu.%zu = %.17g\n", c, eq,
                                  xi(c, eq));
                    summary += buf;
                }
    }
    for (const std::string& w :
         result.is_baseline ? std::vector<std::string>{} : result.report.duplicate_warnings)
        summary += "result.duplicate_warning = " + w + "\n";
    atomic_write(dir / "summary.txt", summary);

    atomic_write(dir / "config_echo.cfg", cfg.echo());
    return dir.string();
}

SweepResult sweep_knob(const RunConfig& cfg, const std::string& knob,
                       const std::vector<double>& values) {
    cfg.validate();
    if (knob != "lambda" && knob != "gamma_std")
        throw ConfigError("sweep knob must be 'lambda' or 'gamma_std'");

    SweepResult sweep;
    for (double value : values) {
        RunConfig one = cfg;
        if (knob == "lambda") {
            if (cfg.method == "sindy-w" || cfg.method == "sindy-wo") {
                one.stlsq_knob = value;
            } else {
                one.fit.sparsity = SparsityMode::lambda_trainable;
                one.fit.sparsity_init = value;
            }
        } else {
            if (cfg.method == "sindy-w" || cfg.method == "sindy-wo")
                throw ConfigError("gamma_std sweep applies to adaptive methods only");
            one.fit.sparsity = SparsityMode::gamma_trainable;
            one.fit.gamma_init_std = value;
        }
        one.fit.record_gamma_history = false;

        SweepRow row;
        row.value = value;
        try {
            const RunResult res = execute_run(one);
            row.support_size =
                count_support(res.is_baseline ? res.baseline.coeffs : res.report.coeffs);
            row.exact_recovery = res.exact_recovery;
            row.residual = res.is_baseline ? 0.0 : res.report.final_loss();
        } catch (const FitDivergedError&) {
            row.support_size = -1;
            row.exact_recovery = false;
            row.residual = std::numeric_limits<double>::infinity();
        }
        sweep.rows.push_back(row);
    }
    sweep.csv = sweep_csv(sweep.rows);
    return sweep;
}

}  // namespace sindy
