#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sindy/runner.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitDiverged = 2;

int do_run(const std::string& config_path) {
    sindy::RunConfig cfg = sindy::parse_run_config(config_path);
    cfg.validate();
    const sindy::RunResult result = sindy::execute_run(cfg);
    const std::string dir = sindy::write_run_artifacts(cfg, result);
    for (const std::string& line : result.equations) std::printf("%s\n", line.c_str());
    std::printf("# artifacts: %s (%.2f s)\n", dir.c_str(), result.seconds_total);
    return 0;
}

int do_sweep(const std::string& config_path, const std::string& knob,
             const std::vector<double>& values) {
    sindy::RunConfig cfg = sindy::parse_run_config(config_path);
    cfg.validate();
    const sindy::SweepResult sweep = sindy::sweep_knob(cfg, knob, values);
    const std::filesystem::path dir = sindy::resolve_output_dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    const std::filesystem::path out = dir / ("sweep_" + knob + ".csv");
    {
        std::ofstream f(out.string() + ".tmp", std::ios::binary);
        f << sweep.csv;
    }
    std::filesystem::rename(out.string() + ".tmp", out);
    std::printf("%s", sweep.csv.c_str());
    std::printf("# sweep table: %s\n", out.string().c_str());
    return 0;
}

int do_list() {
    for (const std::string& name : sindy::benchmark_names()) {
        const sindy::BenchmarkSystem s = sindy::make_benchmark(name);
        std::printf("%-10s states:", name.c_str());
        for (const auto& sn : s.state_names) std::printf(" %s", sn.c_str());
        std::printf("  t=[%g,%g] dt=%g  params:", s.t_start, s.t_end, s.dt);
        for (const auto& [k, v] : s.params) std::printf(" %s=%g", k.c_str(), v);
        std::printf("\n");
    }
    std::printf("wildfire   2-D combustion PDE (see the [pde] config section)\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse identification of nonlinear dynamics with trainable "
                 "nonlinear parameters"};
    app.require_subcommand(1);

    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "execute one experiment from a config file");
    run->add_option("config", run_config, "path to the run config")->required();

    std::string sweep_config, sweep_knob;
    std::vector<double> sweep_values;
    CLI::App* sweep = app.add_subcommand("sweep", "run a sparsity-knob sweep");
    sweep->add_option("config", sweep_config, "path to the run config")->required();
    sweep->add_option("--knob", sweep_knob, "lambda or gamma_std")->required();
    sweep->add_option("--values", sweep_values, "knob values")->delimiter(',')->required();

    CLI::App* list = app.add_subcommand("list-benchmarks", "list the built-in systems");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(run_config);
        if (sweep->parsed()) return do_sweep(sweep_config, sweep_knob, sweep_values);
        if (list->parsed()) return do_list();
    } catch (const sindy::FitDivergedError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitValidation;
}
