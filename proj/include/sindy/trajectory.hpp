#pragma once

#include <string>
#include <vector>

#include "sindy/matrix.hpp"

namespace sindy {

/// Sampled trajectory of a dynamical system: states X and their time
/// derivatives on a uniform time grid. The regression inputs.
struct Trajectory {
    std::vector<double> times;
    Matrix states;       // n samples x m states
    Matrix derivatives;  // same shape
    std::vector<std::string> state_names;

    std::size_t samples() const { return times.size(); }
    std::size_t state_count() const { return states.cols(); }
};

/// Checks the trajectory invariants: strictly increasing uniform times
/// (1e-12 relative), matching shapes, all entries finite. Throws on violation.
void validate(const Trajectory& traj);

/// CSV with header `t,x1..xm,dx1..dxm`, one row per sample, 17 significant
/// digits so a round trip is lossless.
std::string to_csv(const Trajectory& traj);
void write_csv(const Trajectory& traj, const std::string& path);
Trajectory read_csv(const std::string& path);

}  // namespace sindy
