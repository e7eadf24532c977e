// Acceptance suite: each numbered criterion prints one PASS/FAIL line.
// Run with no arguments for all criteria, or pass criterion numbers.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "sindy/baseline.hpp"
#include "sindy/dataset.hpp"
#include "sindy/engine.hpp"
#include "sindy/pde.hpp"
#include "sindy/rng.hpp"
#include "sindy/runner.hpp"

using namespace sindy;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool ok, const std::string& detail = "") {
    std::printf("[%2d] %-58s %s%s%s\n", criterion, what, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void note(const std::string& text) {
    std::printf("     %s\n", text.c_str());
    std::fflush(stdout);
}

struct BenchSetup {
    BenchmarkSystem system;
    Trajectory trajectory;
    LibraryInstance lib;
    FitConfig fit;
};

// hyperparameters of the adaptive runs, one row per experiment
BenchSetup setup_benchmark(const std::string& name) {
    BenchSetup s{make_benchmark(name), {}, {}, {}};
    s.trajectory = integrate(s.system);
    MasterLibraryOptions opts;
    if (name == "vanderpol") {
        opts.trainable_poly_exponent = true;
        opts.include_poly_pow = true;
    } else if (name == "pharma") {
        opts.include_time_power = true;
    }
    s.lib = master_library(static_cast<int>(s.system.state_count()), opts);
    s.lib.input_names = s.trajectory.state_names;

    FitConfig& f = s.fit;
    f.threshold = 5e-3;
    f.decay_factor = 0.5;
    f.batch_size = 0;
    f.seed = 2024;
    if (name == "harmonic") {
        f.epochs = 50000;
        f.learning_rate = 0.1;
        f.decay_every = 4000;
    } else if (name == "vanderpol") {
        f.epochs = 32000;
        f.learning_rate = 0.01;
        f.decay_every = 2500;
    } else if (name == "abc") {
        f.epochs = 60000;
        f.learning_rate = 0.1;
        f.decay_every = 4000;
    } else if (name == "chemical") {
        // epochs/decay per the published run; split per-block rates keep the
        // junk frequencies from running away while the coefficients organize
        f.epochs = 40000;
        f.learning_rate = 0.1;
        f.lr_nl_params = 0.02;
        f.lr_gamma = 0.005;
        f.decay_every = 3000;
    } else if (name == "pharma") {
        f.epochs = 40000;
        f.learning_rate = 0.1;
        f.lr_nl_params = 0.02;
        f.lr_gamma = 0.005;
        f.decay_every = 4500;
    }
    return s;
}

int find_col(const LibraryInstance& lib, Family f, int input, int pair = -1) {
    for (int c = 0; c < lib.columns(); ++c) {
        const auto& s = lib.specs[static_cast<std::size_t>(c)];
        if (s.family == f && s.input == input && s.pair == pair) return c;
    }
    return -1;
}

// accumulated coefficient and (for the non-degenerate representative) the
// nonlinear parameter of every active column matching the canonical shape
struct Recovered {
    double coeff = 0.0;
    double param = std::nan("");
    int columns = 0;
};

Recovered recovered_term(const LibraryInstance& lib, const FitReport& rep, std::size_t eq,
                         Family f, int input, int pair = -1) {
    Recovered out;
    for (int c = 0; c < lib.columns(); ++c) {
        const double v = rep.coeffs(static_cast<std::size_t>(c), eq);
        if (v == 0.0) continue;
        const CandidateSpec& spec = lib.specs[static_cast<std::size_t>(c)];
        const double param = spec.has_slot()
                                 ? rep.nl_params(eq, static_cast<std::size_t>(spec.slot))
                                 : spec.fixed_param;
        const CanonicalTerm can = canonical_term(spec, param);
        if (can.dead || !(can.family == f && can.input == input && can.pair == pair)) continue;
        out.coeff += v;
        ++out.columns;
        if (!can.degenerate) out.param = param;
    }
    return out;
}

std::vector<std::vector<TruthTerm>> truth_of(const BenchSetup& s) {
    return benchmark_truth(s.system);
}

LibraryInstance final_library(const BenchSetup& s, const FitReport& rep) {
    LibraryInstance lib = s.lib;
    lib.nl_params = rep.nl_params;
    return lib;
}

bool support_is(const LibraryInstance& lib, const Matrix& coeffs, std::size_t eq,
                const std::vector<int>& want, std::string* why = nullptr) {
    for (std::size_t c = 0; c < coeffs.rows(); ++c) {
        const bool active = coeffs(c, eq) != 0.0;
        const bool expected =
            std::find(want.begin(), want.end(), static_cast<int>(c)) != want.end();
        if (active != expected) {
            if (why)
                *why = "equation " + std::to_string(eq) + " column " + std::to_string(c) + " (" +
                       family_name(lib.specs[c].family) + ") " +
                       (active ? "unexpectedly active" : "missing");
            return false;
        }
    }
    return true;
}

BaselineGrids grids_for(const std::string& name, bool exact) {
    using std::numbers::pi;
    BaselineGrids g;
    if (name == "harmonic") {
        g.trig_freqs = exact ? std::vector<double>{0.25, 0.5, 0.75, 1.0}
                             : std::vector<double>{0.2, 0.5, 0.7, 1.0};
        g.exp_rates = {1.0};
    } else if (name == "vanderpol") {
        g.poly_exponents = exact ? std::vector<double>{1.0, 2.15}
                                 : std::vector<double>{1.0, 2.5};
        g.trig_freqs = {pi};
        g.exp_rates = {1.0};
    } else if (name == "abc") {
        g.trig_freqs = exact
                           ? std::vector<double>{pi / 2, pi / 2.8, pi / 3, pi / 4, pi / 4.5, pi / 5}
                           : std::vector<double>{pi / 2, pi / 2.5, pi / 3.5, pi / 4, pi / 4.2,
                                                 pi / 5};
        g.exp_rates = {1.0};
    } else if (name == "chemical") {
        g.trig_freqs = {pi};
        g.exp_rates = exact ? std::vector<double>{1.0, 1.015, 1.025, 2.0}
                            : std::vector<double>{1.0, 2.0};
    } else if (name == "pharma") {
        g.trig_freqs = {pi};
        g.exp_rates = {1.0, 2.0};
        g.time_exponents = exact ? std::vector<double>{-0.4, -0.5, -0.55}
                                 : std::vector<double>{-0.4, -0.55};
    }
    return g;
}

double stlsq_knob_for(const std::string& name) {
    if (name == "harmonic") return 0.01;
    if (name == "vanderpol") return 0.0075;
    if (name == "abc") return 0.1;
    if (name == "chemical") return 0.025;
    return 0.01;  // pharma
}

// ------------------------------------------------------------------ 1
void criterion_1() {
    BenchSetup s = setup_benchmark("harmonic");
    const FitReport rep = fit(s.trajectory, s.lib, s.fit);

    std::string why;
    report(1, "harmonic support {y} and {x, y*cos(dx)}, coeffs within 1e-3",
           matches_truth(final_library(s, rep), rep.coeffs, truth_of(s), 1e-3, 1e-3, &why), why);

    const Recovered a = recovered_term(s.lib, rep, 0, Family::poly, 1);
    const Recovered b = recovered_term(s.lib, rep, 1, Family::poly, 0);
    const Recovered c = recovered_term(s.lib, rep, 1, Family::poly_cos, 1, 0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "a=%.8f b=%.8f c=%.8f d=%.8f", a.coeff, b.coeff, c.coeff,
                  c.param);
    note(buf);
    report(1, "harmonic frequency |d - 0.75| <= 1e-3", std::abs(c.param - 0.75) <= 1e-3);
    std::snprintf(buf, sizeof buf, "stretch |d-0.75| <= 1e-6: %s (%.2e)",
                  std::abs(c.param - 0.75) <= 1e-6 ? "yes" : "no", std::abs(c.param - 0.75));
    note(buf);

    // retained candidates contract their sparsity weights (joint minimization)
    Rng gamma_rng(sub_seed(s.fit.seed, "gamma-init"));
    Matrix gamma0(rep.gamma.rows(), rep.gamma.cols());
    for (double& v : gamma0.flat()) v = gamma_rng.gaussian(0.0, s.fit.gamma_init_std);
    bool contracted = true;
    const std::size_t p = rep.coeffs.rows();
    for (std::size_t eq = 0; eq < rep.coeffs.cols(); ++eq)
        for (std::size_t c2 = 0; c2 < p; ++c2)
            if (rep.coeffs(c2, eq) != 0.0 &&
                std::abs(rep.gamma(eq, c2)) >= std::abs(gamma0(eq, c2)))
                contracted = false;
    report(1, "harmonic retained |gamma| below its initialization", contracted);
}

// ------------------------------------------------------------------ 2
void criterion_2() {
    BenchSetup s = setup_benchmark("vanderpol");
    const FitReport rep = fit(s.trajectory, s.lib, s.fit);

    std::string why;
    report(2, "van der pol support {y} and {x, y, y*x^b} with mu terms",
           matches_truth(final_library(s, rep), rep.coeffs, truth_of(s), -1.0, 5e-3, &why), why);

    const Recovered pow_yx = recovered_term(s.lib, rep, 1, Family::poly_pow, 1, 0);
    const Recovered mu_y = recovered_term(s.lib, rep, 1, Family::poly, 1);
    char buf[160];
    std::snprintf(buf, sizeof buf, "b=%.8f mu(y)=%.8f mu(pow)=%.8f", pow_yx.param, mu_y.coeff,
                  -pow_yx.coeff);
    note(buf);
    report(2, "van der pol exponent |b - 2.15| <= 5e-3", std::abs(pow_yx.param - 2.15) <= 5e-3);
}

// ------------------------------------------------------------------ 3
void criterion_3() {
    BenchSetup s = setup_benchmark("abc");
    const FitReport rep = fit(s.trajectory, s.lib, s.fit);

    std::string why;
    report(3, "abc six frequencies and amplitudes within 1e-3",
           matches_truth(final_library(s, rep), rep.coeffs, truth_of(s), 1e-3, 1e-3, &why), why);
    for (std::size_t eq = 0; eq < 3; ++eq) {
        const Recovered si = recovered_term(s.lib, rep, eq, Family::sine, eq == 0 ? 2 : (eq == 1 ? 0 : 1));
        const Recovered co = recovered_term(s.lib, rep, eq, Family::cosine, eq == 0 ? 1 : (eq == 1 ? 2 : 0));
        char buf[200];
        std::snprintf(buf, sizeof buf, "eq%zu: %.6f sin(%.6f .) + %.6f cos(%.6f .)", eq, si.coeff,
                      si.param, co.coeff, co.param);
        note(buf);
    }

    // physics-penalty variant on the same data
    FitConfig div_cfg = s.fit;
    div_cfg.epochs = 200;
    div_cfg.learning_rate = 0.1;
    div_cfg.decay_every = 50;
    div_cfg.threshold_start = 0;
    const FitReport rep_div = fit_divergence(s.trajectory, s.lib, div_cfg);
    report(3, "divergence-penalty variant matches in <= 200 epochs",
           matches_truth(final_library(s, rep_div), rep_div.coeffs, truth_of(s), 1e-3, 1e-3,
                         &why),
           why);
}

// ------------------------------------------------------------------ 4
void criterion_4() {
    BenchSetup s = setup_benchmark("chemical");
    const FitReport rep = fit(s.trajectory, s.lib, s.fit);

    const Recovered gterm = recovered_term(s.lib, rep, 0, Family::poly_exp, 0, 1);
    const Recovered hterm = recovered_term(s.lib, rep, 1, Family::poly_exp, 0, 1);
    char buf[160];
    std::snprintf(buf, sizeof buf, "g=%.6f h=%.6f k=%.6f", gterm.param, hterm.param,
                  -gterm.coeff);
    note(buf);
    std::string why;
    report(4, "chemical support and coefficients (k within 2e-3)",
           matches_truth(final_library(s, rep), rep.coeffs, truth_of(s), 2e-3, 2e-3, &why), why);
    report(4, "chemical g, h within 2e-3",
           std::abs(gterm.param - 1.015) <= 2e-3 && std::abs(hterm.param - 1.025) <= 2e-3);

    // trainable scalar knob, starting high
    FitConfig lam_cfg = s.fit;
    lam_cfg.sparsity = SparsityMode::lambda_trainable;
    lam_cfg.sparsity_init = 0.1;
    const FitReport rep_l = fit(s.trajectory, s.lib, lam_cfg);
    report(4, "chemical support exact with trainable knob at 0.1",
           matches_truth(final_library(s, rep_l), rep_l.coeffs, truth_of(s), -1.0, 0.2, &why),
           why);
}

// ------------------------------------------------------------------ 5
void criterion_5() {
    BenchSetup s = setup_benchmark("pharma");
    const FitReport rep = fit(s.trajectory, s.lib, s.fit);

    std::string why;
    report(5, "pharma support {B, G t^e} / {G t^e} / {B}",
           matches_truth(final_library(s, rep), rep.coeffs, truth_of(s), -1.0, 5e-3, &why), why);

    const Recovered tpB = recovered_term(s.lib, rep, 0, Family::time_power, 1);
    const Recovered tpG = recovered_term(s.lib, rep, 1, Family::time_power, 1);
    const Recovered polyB = recovered_term(s.lib, rep, 0, Family::poly, 0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "eta(B)=%.6f eta(G)=%.6f kb=%.6f k0(B)=%.6f", tpB.param,
                  tpG.param, -polyB.coeff, tpB.coeff);
    note(buf);
    report(5, "pharma exponent within 5e-3 of -0.5 and kb within 2e-3",
           std::abs(tpB.param + 0.5) <= 5e-3 && std::abs(tpG.param + 0.5) <= 5e-3 &&
               std::abs(-polyB.coeff - 0.15) <= 2e-3);
}

// ------------------------------------------------------------------ 6
void criterion_6() {
    const WildfireParams params;
    GridSpec grid;
    grid.nx = grid.ny = 64;
    grid.dx = grid.dy = 16.0 / 63.0;
    const FieldSeries series = simulate_wildfire(params, grid, 0.004, 0.08);
    const RegressionProblem prob = flatten_for_regression(series);
    const LibraryInstance lib = wildfire_library();

    FitConfig cfg;
    cfg.epochs = 20000;
    cfg.learning_rate = 0.01;
    cfg.decay_every = 2500;
    cfg.threshold = 5e-3;
    cfg.seed = 2024;
    const FitReport rep = fit(prob, lib, cfg);

    std::string why;
    const bool support = support_is(lib, rep.coeffs, 0, {1, 2, 3, 4, 5, 10}, &why);
    report(6, "wildfire support {T, T_x, T_y, T_xx, T_yy, exp}", support, why);

    const double bandwidth = rep.nl_params(0, 0);
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "H=%.6f T=%.4f Tx=%.4f Ty=%.4f Txx=%.4f Tyy=%.4f exp=%.4f", bandwidth,
                  rep.coeffs(1, 0), rep.coeffs(2, 0), rep.coeffs(3, 0), rep.coeffs(4, 0),
                  rep.coeffs(5, 0), rep.coeffs(10, 0));
    note(buf);
    report(6, "wildfire bandwidth |H - 0.3| <= 5e-3", std::abs(bandwidth - 0.3) <= 5e-3);
    report(6, "wildfire coefficient signs (diffusion +, advection -, cooling -)",
           rep.coeffs(4, 0) > 0 && rep.coeffs(5, 0) > 0 && rep.coeffs(2, 0) < 0 &&
               rep.coeffs(3, 0) < 0 && rep.coeffs(1, 0) < 0 && rep.coeffs(10, 0) > 0);
}

// ------------------------------------------------------------------ 7
void criterion_7() {
    for (const std::string& name : benchmark_names()) {
        BenchSetup s = setup_benchmark(name);
        const double knob = stlsq_knob_for(name);

        const LibraryInstance lib_w = build_fixed_library(s.lib, grids_for(name, true));
        const Matrix theta_w = evaluate(lib_w, 0, s.trajectory.states, s.trajectory.times);
        const StlsqResult res_w = stlsq(theta_w, s.trajectory.derivatives, knob);
        std::string why;
        const bool exact = matches_truth(lib_w, res_w.coeffs, benchmark_truth(s.system), 1e-3,
                                         1e-3, &why);
        report(7, (name + ": exact-grid stlsq recovers the truth").c_str(), exact, why);

        const LibraryInstance lib_wo = build_fixed_library(s.lib, grids_for(name, false));
        const Matrix theta_wo = evaluate(lib_wo, 0, s.trajectory.states, s.trajectory.times);
        const StlsqResult res_wo = stlsq(theta_wo, s.trajectory.derivatives, knob);
        int support_w = 0, support_wo = 0, ydot_wo = 0;
        for (std::size_t eq = 0; eq < res_w.coeffs.cols(); ++eq)
            for (std::size_t c = 0; c < res_w.coeffs.rows(); ++c)
                if (res_w.coeffs(c, eq) != 0.0) ++support_w;
        for (std::size_t eq = 0; eq < res_wo.coeffs.cols(); ++eq)
            for (std::size_t c = 0; c < res_wo.coeffs.rows(); ++c)
                if (res_wo.coeffs(c, eq) != 0.0) {
                    ++support_wo;
                    if (eq == 1) ++ydot_wo;
                }
        char buf[120];
        std::snprintf(buf, sizeof buf, "support %d (exact grid) vs %d (inexact grid)", support_w,
                      support_wo);
        report(7, (name + ": inexact grid strictly denser").c_str(), support_wo > support_w, buf);
        if (name == "harmonic")
            report(7, "harmonic inexact-grid dy/dt support >= 10 terms", ydot_wo >= 10,
                   "got " + std::to_string(ydot_wo));
    }
}

// ------------------------------------------------------------------ 8
void criterion_8() {
    RunConfig cfg;
    cfg.experiment = "harmonic";
    cfg.method = "adam-sindy";
    cfg.seed = 2024;
    cfg.fit = setup_benchmark("harmonic").fit;
    const SweepResult harmonic = sweep_knob(cfg, "gamma_std", {1e-6, 1e-3, 1.0, 10.0});
    bool all = true;
    for (const SweepRow& row : harmonic.rows) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "gamma_std=%g support=%d exact=%d", row.value,
                      row.support_size, row.exact_recovery ? 1 : 0);
        note(buf);
        all = all && row.exact_recovery;
    }
    report(8, "harmonic gamma_std sweep {1e-6,1e-3,1,10} all exact", all);

    RunConfig pharma_cfg;
    pharma_cfg.experiment = "pharma";
    pharma_cfg.method = "adam-sindy";
    pharma_cfg.seed = 2024;
    pharma_cfg.fit = setup_benchmark("pharma").fit;
    const SweepResult pharma = sweep_knob(pharma_cfg, "gamma_std", {0.1});
    report(8, "pharma gamma_std = 0.1 fails to recover", !pharma.rows[0].exact_recovery,
           "support " + std::to_string(pharma.rows[0].support_size));
}

// ------------------------------------------------------------------ 9
void criterion_9() {
    // gradient checks over random instances
    {
        Rng rng(1234);
        int bad = 0, total = 0;
        const double h = 1e-6;
        for (int rep = 0; rep < 100; ++rep) {
            MasterLibraryOptions opts;
            opts.trainable_poly_exponent = true;
            opts.include_time_power = true;
            opts.include_rational_exp = true;
            LibraryInstance lib = master_library(1, opts);
            for (double& v : lib.nl_params.flat()) v = 0.3 + rng.uniform();
            // keep the rational-exponential pole outside the sampled x range
            for (const CandidateSpec& spec : lib.specs)
                if (spec.family == Family::rational_exp)
                    lib.nl_params(0, static_cast<std::size_t>(spec.slot)) =
                        0.1 + 0.3 * rng.uniform();
            const std::size_t n = 10;
            Matrix X(n, 1), dxdt(n, 1);
            std::vector<double> t(n);
            for (std::size_t r = 0; r < n; ++r) {
                const double mag = 0.2 + 1.5 * rng.uniform();
                X(r, 0) = rng.uniform() < 0.5 ? -mag : mag;
                t[r] = 0.4 + rng.uniform();
                dxdt(r, 0) = rng.gaussian();
            }
            const auto p = static_cast<std::size_t>(lib.columns());
            Matrix coeffs(p, 1), gamma(1, p);
            for (double& v : coeffs.flat()) v = (rng.uniform() < 0.5 ? -1 : 1) *
                                                (0.1 + rng.uniform());
            for (double& v : gamma.flat()) v = (rng.uniform() < 0.5 ? -1 : 1) *
                                               (0.1 + rng.uniform());
            const double sp = 0.2 + rng.uniform();

            auto value = [&](const LibraryInstance& l, const Matrix& xi) {
                return loss_eq(dxdt.col(0), evaluate(l, 0, X, t), xi.col(0), sp, gamma.row(0));
            };
            const Matrix theta = evaluate(lib, 0, X, t);
            const auto gxi = grad_coeffs_eq(dxdt.col(0), theta, coeffs.col(0), sp, gamma.row(0));
            for (std::size_t c = 0; c < p; ++c) {
                Matrix up = coeffs, dn = coeffs;
                up(c, 0) += h;
                dn(c, 0) -= h;
                const double fd = (value(lib, up) - value(lib, dn)) / (2 * h);
                ++total;
                if (std::abs(gxi[c] - fd) / std::max({std::abs(fd), std::abs(gxi[c]), 1.0}) >
                    1e-6)
                    ++bad;
            }
            std::vector<double> resid(n);
            for (std::size_t r = 0; r < n; ++r) {
                double pred = 0.0;
                for (std::size_t c = 0; c < p; ++c) pred += theta(r, c) * coeffs(c, 0);
                resid[r] = dxdt(r, 0) - pred;
            }
            const Matrix dslot = d_theta_d_lambda(lib, 0, X, t);
            const auto gnl = grad_nl_eq(lib, 0, dslot, resid, coeffs.col(0));
            for (int s = 0; s < lib.n_slots; ++s) {
                LibraryInstance up = lib, dn = lib;
                up.nl_params(0, static_cast<std::size_t>(s)) += h;
                dn.nl_params(0, static_cast<std::size_t>(s)) -= h;
                const double fd = (value(up, coeffs) - value(dn, coeffs)) / (2 * h);
                ++total;
                const double an = gnl[static_cast<std::size_t>(s)];
                if (std::abs(an - fd) / std::max({std::abs(fd), std::abs(an), 1.0}) > 1e-6)
                    ++bad;
            }
            const auto gg = grad_gamma_eq(coeffs.col(0), sp, gamma.row(0));
            for (std::size_t c = 0; c < p; ++c) {
                const double want = sp * std::abs(coeffs(c, 0)) *
                                    (gamma(0, c) > 0 ? 1.0 : (gamma(0, c) < 0 ? -1.0 : 0.0));
                ++total;
                if (std::abs(gg[c] - want) > 1e-12) ++bad;
            }
        }
        report(9, "gradient checks vs finite differences (100 instances)", bad == 0,
               std::to_string(bad) + "/" + std::to_string(total) + " bad");
    }

    // saturation + mask permanence on a 200-epoch toy run
    {
        RegressionProblem prob;
        const std::size_t n = 200;
        prob.inputs.resize(n, 1);
        prob.targets.resize(n, 1);
        prob.t.assign(n, 1.0);
        prob.target_names = {"x"};
        for (std::size_t i = 0; i < n; ++i) {
            const double x = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(n - 1);
            prob.inputs(i, 0) = x;
            prob.targets(i, 0) = 2.0 * std::sin(0.9 * x) - 0.5 * x;
        }
        FitConfig cfg;
        cfg.epochs = 200;
        cfg.learning_rate = 0.05;
        cfg.decay_every = 100;
        cfg.threshold_start = 0;
        cfg.seed = 11;
        const LibraryInstance lib = master_library(1);
        const FitReport rep = fit(prob, lib, cfg);
        FitConfig half = cfg;
        half.epochs = 120;
        const FitReport rep_half = fit(prob, lib, half);

        bool saturated = true, some_masked = false;
        for (std::size_t c = 0; c < rep.coeffs.rows(); ++c)
            if (rep.coeff_mask[c]) {
                some_masked = true;
                const double last = rep.gamma_history(199, c);
                for (std::size_t e = 150; e < 200; ++e)
                    if (rep.gamma_history(e, c) != last) saturated = false;
            }
        bool permanent = true;
        for (std::size_t i = 0; i < rep_half.coeff_mask.size(); ++i)
            if (rep_half.coeff_mask[i] && (!rep.coeff_mask[i] || rep.coeffs.flat()[i] != 0.0))
                permanent = false;
        report(9, "gamma saturation after thresholding (toy run)", saturated && some_masked);
        report(9, "mask permanence across the 120/200-epoch prefix", permanent);
    }

    // stlsq at knob zero equals the normal-equations solution
    {
        Rng rng(5);
        const std::size_t n = 60, p = 6;
        Matrix theta(n, p), dxdt(n, 1);
        for (double& v : theta.flat()) v = rng.gaussian();
        for (double& v : dxdt.flat()) v = rng.gaussian();
        const StlsqResult res = stlsq(theta, dxdt, 0.0);
        // solve the normal equations by Gaussian elimination, independently
        std::vector<std::vector<double>> A(p, std::vector<double>(p + 1, 0.0));
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t r = 0; r < n; ++r) A[i][j] += theta(r, i) * theta(r, j);
            for (std::size_t r = 0; r < n; ++r) A[i][p] += theta(r, i) * dxdt(r, 0);
        }
        for (std::size_t k = 0; k < p; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < p; ++i)
                if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
            std::swap(A[k], A[piv]);
            for (std::size_t i = k + 1; i < p; ++i) {
                const double f = A[i][k] / A[k][k];
                for (std::size_t j = k; j <= p; ++j) A[i][j] -= f * A[k][j];
            }
        }
        std::vector<double> oracle(p);
        for (std::size_t i = p; i-- > 0;) {
            double acc = A[i][p];
            for (std::size_t j = i + 1; j < p; ++j) acc -= A[i][j] * oracle[j];
            oracle[i] = acc / A[i][i];
        }
        double max_rel = 0.0;
        for (std::size_t c = 0; c < p; ++c)
            max_rel = std::max(max_rel, std::abs(res.coeffs(c, 0) - oracle[c]) /
                                            std::max(1e-12, std::abs(oracle[c])));
        report(9, "stlsq(0) equals the normal-equations oracle to 1e-10", max_rel <= 1e-10,
               "max rel " + std::to_string(max_rel));
    }

    // rk4 convergence order
    {
        BenchmarkSystem s;
        s.name = "decay";
        s.state_names = {"x"};
        s.initial_state = {1.0};
        s.t_end = 1.0;
        s.rhs = [](std::span<const double> x, double, std::span<double> dx) { dx[0] = -x[0]; };
        auto err = [&s](double dt) {
            s.dt = dt;
            const Trajectory t = integrate(s);
            return std::abs(t.states(t.samples() - 1, 0) - std::exp(-1.0));
        };
        const double ratio = err(0.02) / err(0.01);
        report(9, "rk4 halving dt shrinks the error by >= 12x", ratio >= 12.0,
               "ratio " + std::to_string(ratio));
    }

    // self-adaptation identity: cos column at frequency 0 equals constant
    {
        LibraryInstance lib = master_library(1);
        lib.nl_params(0, static_cast<std::size_t>(lib.specs[3].slot)) = 0.0;
        Rng rng(6);
        Matrix X(32, 1);
        for (double& v : X.flat()) v = rng.gaussian();
        const Matrix theta = evaluate(lib, 0, X);
        bool same = true;
        for (std::size_t r = 0; r < X.rows(); ++r)
            if (theta(r, 3) != theta(r, 0)) same = false;
        report(9, "cos column with zero frequency equals the constant column", same);
    }
}

// ------------------------------------------------------------------ 10
void criterion_10() {
    BenchSetup s = setup_benchmark("harmonic");

    FitConfig minmax = s.fit;
    minmax.objective = ObjectiveMode::min_max;
    const FitReport rep_mm = fit(s.trajectory, s.lib, minmax);
    int survivors = 0;
    for (double v : rep_mm.coeffs.flat())
        if (v != 0.0) ++survivors;
    report(10, "min-max run thresholds every candidate away", rep_mm.empty_model,
           "survivors " + std::to_string(survivors));

    const FitReport rep_joint = fit(s.trajectory, s.lib, s.fit);
    std::string why;
    const bool joint_ok =
        matches_truth(final_library(s, rep_joint), rep_joint.coeffs, truth_of(s), 1e-3, 1e-3,
                      &why);
    report(10, "joint minimization recovers the model on the same data", joint_ok, why);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    for (int c : which) {
        switch (c) {
            case 1: criterion_1(); break;
            case 2: criterion_2(); break;
            case 3: criterion_3(); break;
            case 4: criterion_4(); break;
            case 5: criterion_5(); break;
            case 6: criterion_6(); break;
            case 7: criterion_7(); break;
            case 8: criterion_8(); break;
            case 9: criterion_9(); break;
            case 10: criterion_10(); break;
            default:
                std::fprintf(stderr, "unknown criterion %d\n", c);
                return 2;
        }
    }
    if (g_failures) std::printf("%d check(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
