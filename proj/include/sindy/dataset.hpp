#pragma once

#include <cstdint>

#include "sindy/benchmarks.hpp"
#include "sindy/trajectory.hpp"

namespace sindy {

/// Fixed-step classical 4th-order Runge-Kutta from the system's initial
/// state. States are sampled at every step; derivatives are filled from the
/// known right-hand side (see derivatives_exact). Throws std::runtime_error
/// with the step index if the state leaves the finite range.
Trajectory integrate(const BenchmarkSystem& system);

/// dX(t_i) = f(X(t_i), t_i) evaluated from the known right-hand side.
Matrix derivatives_exact(const BenchmarkSystem& system, const Trajectory& traj);

/// Second-order central differences on the interior, one-sided second-order
/// stencils at the endpoints. Requires n >= 3 uniform samples.
Matrix derivatives_fd(const Trajectory& traj);

/// Perturbs each state column with zero-mean Gaussian noise whose standard
/// deviation is `fraction` times that column's standard deviation, then
/// recomputes derivatives by finite differences. fraction == 0 returns the
/// input unchanged. Deterministic for a fixed seed.
Trajectory add_noise(const Trajectory& traj, double fraction, std::uint64_t seed);

}  // namespace sindy
