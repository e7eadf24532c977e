#include "sindy/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sindy/rng.hpp"

namespace sindy {

Trajectory integrate(const BenchmarkSystem& system) {
    if (system.dt <= 0.0) throw std::invalid_argument("integrate: dt must be positive");
    if (system.t_end <= system.t_start) throw std::invalid_argument("integrate: empty time span");
    if (!system.rhs) throw std::invalid_argument("integrate: system has no right-hand side");

    const std::size_t m = system.state_count();
    const double dt = system.dt;
    const auto n_steps =
        static_cast<std::size_t>(std::llround((system.t_end - system.t_start) / dt));
    const std::size_t n = n_steps + 1;

    Trajectory traj;
    traj.state_names = system.state_names;
    traj.times.resize(n);
    traj.states.resize(n, m);
    traj.derivatives.resize(n, m);

    std::vector<double> x(system.initial_state);
    std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = system.t_start + static_cast<double>(i) * dt;
        traj.times[i] = t;
        for (std::size_t j = 0; j < m; ++j) {
            if (!std::isfinite(x[j]))
                throw std::runtime_error("integrate: non-finite state at step " +
                                         std::to_string(i));
            traj.states(i, j) = x[j];
        }
        if (i + 1 == n) break;

        system.rhs(x, t, k1);
        for (std::size_t j = 0; j < m; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
        system.rhs(tmp, t + 0.5 * dt, k2);
        for (std::size_t j = 0; j < m; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
        system.rhs(tmp, t + 0.5 * dt, k3);
        for (std::size_t j = 0; j < m; ++j) tmp[j] = x[j] + dt * k3[j];
        system.rhs(tmp, t + dt, k4);
        for (std::size_t j = 0; j < m; ++j)
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }

    traj.derivatives = derivatives_exact(system, traj);
    return traj;
}

Matrix derivatives_exact(const BenchmarkSystem& system, const Trajectory& traj) {
    const std::size_t n = traj.samples();
    const std::size_t m = traj.state_count();
    Matrix out(n, m);
    std::vector<double> dx(m);
    for (std::size_t i = 0; i < n; ++i) {
        system.rhs(traj.states.row(i), traj.times[i], dx);
        for (std::size_t j = 0; j < m; ++j) out(i, j) = dx[j];
    }
    return out;
}

Matrix derivatives_fd(const Trajectory& traj) {
    const std::size_t n = traj.samples();
    const std::size_t m = traj.state_count();
    if (n < 3) throw std::invalid_argument("derivatives_fd: need at least 3 samples");
    const double dt = traj.times[1] - traj.times[0];
    const Matrix& x = traj.states;
    Matrix out(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        out(0, j) = (-3.0 * x(0, j) + 4.0 * x(1, j) - x(2, j)) / (2.0 * dt);
        for (std::size_t i = 1; i + 1 < n; ++i)
            out(i, j) = (x(i + 1, j) - x(i - 1, j)) / (2.0 * dt);
        out(n - 1, j) = (3.0 * x(n - 1, j) - 4.0 * x(n - 2, j) + x(n - 3, j)) / (2.0 * dt);
    }
    return out;
}

Trajectory add_noise(const Trajectory& traj, double fraction, std::uint64_t seed) {
    if (fraction < 0.0) throw std::invalid_argument("add_noise: fraction must be >= 0");
    if (fraction == 0.0) return traj;

    const std::size_t n = traj.samples();
    const std::size_t m = traj.state_count();
    Trajectory out = traj;
    Rng rng(sub_seed(seed, "noise"));
    for (std::size_t j = 0; j < m; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += traj.states(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = traj.states(i, j) - mean;
            var += d * d;
        }
        const double sigma = fraction * std::sqrt(var / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) out.states(i, j) += rng.gaussian(0.0, sigma);
    }
    out.derivatives = derivatives_fd(out);
    return out;
}

}  // namespace sindy
