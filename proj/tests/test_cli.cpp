#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sindy/runner.hpp"

using namespace sindy;
namespace fs = std::filesystem;

namespace {

// small harmonic run that finishes in well under a second
std::string tiny_harmonic_cfg(const std::string& outdir) {
    return "[run]\n"
           "experiment = harmonic\n"
           "method = adam-sindy\n"
           "output_dir = " + outdir + "\n"
           "seed = 2024\n"
           "[data]\n"
           "t_end = 5\n"
           "[fit]\n"
           "epochs = 400\n"
           "learning_rate = 0.1\n"
           "decay_every = 150\n"
           "threshold = 5e-3\n";
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sindy_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("config text parses into typed fields") {
    const RunConfig cfg = parse_run_config_text(
        "[run]\n"
        "experiment = chemical\n"
        "method = sindy-w\n"
        "seed = 7\n"
        "[baseline]\n"
        "stlsq_knob = 0.025\n"
        "trig_freqs = 3.14159\n"
        "exp_rates = 1.0, 1.015, 1.025, 2\n"
        "[fit]\n"
        "epochs = 40000\n"
        "objective = joint_min\n"
        "sparsity = lambda\n");
    CHECK(cfg.experiment == "chemical");
    CHECK(cfg.method == "sindy-w");
    CHECK(cfg.seed == 7);
    CHECK(cfg.stlsq_knob == 0.025);
    REQUIRE(cfg.grids.exp_rates.size() == 4);
    CHECK(cfg.grids.exp_rates[1] == 1.015);
    CHECK(cfg.fit.sparsity == SparsityMode::lambda_trainable);
    cfg.validate();
}

TEST_CASE("unknown keys are rejected, all of them reported") {
    try {
        (void)parse_run_config_text(
            "[run]\n"
            "experiment = harmonic\n"
            "methd = adam-sindy\n"
            "[fit]\n"
            "epochz = 10\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.bad_keys().size() == 2);
        CHECK(e.bad_keys()[0] == "run.methd");
        CHECK(e.bad_keys()[1] == "fit.epochz");
    }
}

TEST_CASE("malformed lines and unknown enum values are rejected") {
    CHECK_THROWS_AS((void)parse_run_config_text("experiment = harmonic\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config_text("[run\nexperiment = x\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config_text("[fit]\nobjective = sometimes\n"), ConfigError);

    RunConfig bad_method = parse_run_config_text("[run]\nexperiment = harmonic\n"
                                                 "method = sindy-q\n");
    CHECK_THROWS_AS(bad_method.validate(), ConfigError);

    RunConfig bad_exp = parse_run_config_text("[run]\nexperiment = lorenz\n"
                                              "method = adam-sindy\n");
    CHECK_THROWS_AS(bad_exp.validate(), ConfigError);
}

TEST_CASE("config echo round-trips") {
    const std::string text = tiny_harmonic_cfg("out/tiny");
    const RunConfig cfg = parse_run_config_text(text);
    const RunConfig again = parse_run_config_text(cfg.echo());
    CHECK(again.echo() == cfg.echo());
    CHECK(again.fit.epochs == 400);
    CHECK(again.t_end_override.has_value());
}

TEST_CASE("a tiny run writes every artifact and reruns byte-identically") {
    TempDir tmp;
    RunConfig cfg = parse_run_config_text(tiny_harmonic_cfg((tmp.path / "run1").string()));
    cfg.validate();
    const RunResult result = execute_run(cfg);
    const std::string dir = write_run_artifacts(cfg, result);

    for (const char* name : {"trajectory.csv", "loss_history.csv", "gamma_history.csv",
                             "equations.txt", "summary.txt", "config_echo.cfg"})
        CHECK(fs::exists(fs::path(dir) / name));
    CHECK(slurp(fs::path(dir) / "summary.txt").find("result.final_loss") != std::string::npos);

    // second run, fresh directory: summary bytes identical
    RunConfig cfg2 = cfg;
    cfg2.output_dir = (tmp.path / "run2").string();
    const RunResult result2 = execute_run(cfg2);
    const std::string dir2 = write_run_artifacts(cfg2, result2);
    auto strip_dir = [](std::string s, const std::string& d) {
        // output_dir is echoed into the summary; normalize it away
        std::size_t pos;
        while ((pos = s.find(d)) != std::string::npos) s.erase(pos, d.size());
        return s;
    };
    CHECK(strip_dir(slurp(fs::path(dir) / "summary.txt"), dir) ==
          strip_dir(slurp(fs::path(dir2) / "summary.txt"), dir2));

    // re-running from the echoed config reproduces the run
    RunConfig echoed = parse_run_config_text(slurp(fs::path(dir) / "config_echo.cfg"));
    echoed.output_dir = (tmp.path / "run3").string();
    const RunResult result3 = execute_run(echoed);
    const std::string dir3 = write_run_artifacts(echoed, result3);
    CHECK(strip_dir(slurp(fs::path(dir) / "summary.txt"), dir) ==
          strip_dir(slurp(fs::path(dir3) / "summary.txt"), dir3));
}

TEST_CASE("environment variable prefixes relative output directories") {
    CHECK(resolve_output_dir("/abs/path") == "/abs/path");
    ::setenv("SINDY_OUTPUT_ROOT", "/tmp/sindy_root", 1);
    CHECK(resolve_output_dir("rel") == "/tmp/sindy_root/rel");
    ::unsetenv("SINDY_OUTPUT_ROOT");
}

TEST_CASE("baseline run through the runner recovers the tiny harmonic problem") {
    TempDir tmp;
    RunConfig cfg = parse_run_config_text(
        "[run]\n"
        "experiment = harmonic\n"
        "method = sindy-w\n"
        "output_dir = " + (tmp.path / "base").string() + "\n"
        "[data]\n"
        "t_end = 10\n"
        "[baseline]\n"
        "stlsq_knob = 0.01\n"
        "trig_freqs = 0.25, 0.5, 0.75, 1.0\n"
        "exp_rates = 1.0\n");
    cfg.validate();
    const RunResult res = execute_run(cfg);
    CHECK(res.is_baseline);
    CHECK(res.exact_recovery);
    const std::string dir = write_run_artifacts(cfg, res);
    const std::string summary = slurp(fs::path(dir) / "summary.txt");
    CHECK(summary.find("result.exact_recovery = true") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(dir) / "loss_history.csv"));
}

TEST_CASE("sweep with no values yields an empty table") {
    RunConfig cfg = parse_run_config_text(tiny_harmonic_cfg("unused"));
    const SweepResult sweep = sweep_knob(cfg, "gamma_std", {});
    CHECK(sweep.rows.empty());
    CHECK(sweep.csv == "value,support_size,exact_recovery,final_loss\n");
    CHECK_THROWS_AS((void)sweep_knob(cfg, "epsilon", {1.0}), ConfigError);
}

TEST_CASE("equations land on stdout-ready strings and in the text artifact") {
    TempDir tmp;
    RunConfig cfg = parse_run_config_text(tiny_harmonic_cfg((tmp.path / "eq").string()));
    const RunResult res = execute_run(cfg);
    REQUIRE(res.equations.size() >= 2);
    CHECK(res.equations[0].rfind("dx/dt = ", 0) == 0);
    const std::string dir = write_run_artifacts(cfg, res);
    CHECK(slurp(fs::path(dir) / "equations.txt").find("dy/dt") != std::string::npos);
}
