// Times the OpenMP kernels against the serial reference implementations.
#include <chrono>
#include <cstdio>
#include <functional>

#include "sindy/kernels.hpp"
#include "sindy/pde.hpp"
#include "sindy/rng.hpp"

namespace {

using sindy::Matrix;

double time_of(const std::function<void()>& fn, int reps) {
    // warm-up
    fn();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %9.3f ms   parallel %9.3f ms   speedup %.2fx\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
    const int m = 3;
    const std::size_t n = 200000;
    sindy::MasterLibraryOptions opts;
    opts.include_rational_exp = true;
    const sindy::LibraryInstance lib = sindy::master_library(m, opts);
    const auto p = static_cast<std::size_t>(lib.columns());
    const auto ns = static_cast<std::size_t>(lib.n_slots);

    sindy::Rng rng(7);
    Matrix inputs_T(static_cast<std::size_t>(m), n);
    for (double& v : inputs_T.flat()) v = 0.1 + rng.uniform();
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = 0.5 + 1e-3 * static_cast<double>(i);

    std::vector<sindy::kernels::ColumnJob> jobs;
    for (int c = 0; c < lib.columns(); ++c)
        jobs.push_back({.col = c, .want_value = true, .slot = lib.specs[static_cast<std::size_t>(c)].slot});

    Matrix theta_a(p, n), theta_b(p, n), dslot_a(ns, n), dslot_b(ns, n);
    report("fill_columns",
           time_of([&] { sindy::kernels::ref::fill_columns(lib, 0, inputs_T, t, jobs, theta_a,
                                                           dslot_a); },
                   3),
           time_of([&] { sindy::kernels::fill_columns(lib, 0, inputs_T, t, jobs, theta_b,
                                                      dslot_b); },
                   3));

    std::vector<double> coeff(p), yhat_a(n), yhat_b(n);
    for (double& v : coeff) v = rng.gaussian();
    std::vector<int> active;
    for (int c = 0; c < lib.columns(); ++c) active.push_back(c);
    report("predict",
           time_of([&] { sindy::kernels::ref::predict(theta_a, coeff, active, yhat_a); }, 10),
           time_of([&] { sindy::kernels::predict(theta_a, coeff, active, yhat_b); }, 10));

    std::vector<double> dots_a(p), dots_b(p);
    report("row_dots",
           time_of([&] { sindy::kernels::ref::row_dots(theta_a, yhat_a, active, dots_a); }, 10),
           time_of([&] { sindy::kernels::row_dots(theta_a, yhat_a, active, dots_b); }, 10));

    // stencil sweep on a large field (parallel inside fd_derivative)
    sindy::GridSpec grid{.nx = 1024, .ny = 1024, .x0 = 0, .y0 = 0, .dx = 0.01, .dy = 0.01};
    sindy::Field2D field{grid, std::vector<double>(static_cast<std::size_t>(grid.nx) * grid.ny)};
    for (double& v : field.values) v = rng.uniform();
    std::printf("fd_derivative(4th, 1024^2): %.3f ms per call\n",
                time_of([&] { sindy::fd_derivative(field, 0, 4); }, 5) * 1e3);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < p * n; ++i)
        max_dev = std::max(max_dev, std::abs(theta_a.flat()[i] - theta_b.flat()[i]));
    std::printf("max |serial - parallel| over theta: %g\n", max_dev);
    return 0;
}
