#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sindy {

/// One of the built-in benchmark ODE systems with its ground-truth
/// parameters. `rhs` is pure: the same (x, t) always yields the same value.
struct BenchmarkSystem {
    std::string name;
    std::map<std::string, double> params;
    std::vector<std::string> state_names;
    std::vector<double> initial_state;
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    std::function<void(std::span<const double>, double, std::span<double>)> rhs;

    std::size_t state_count() const { return initial_state.size(); }
};

/// Names accepted by make_benchmark.
std::vector<std::string> benchmark_names();

/// Builds a benchmark system with its default parameters; entries in
/// `overrides` replace matching parameters only. Unknown system or
/// parameter names throw std::invalid_argument.
BenchmarkSystem make_benchmark(const std::string& name,
                               const std::map<std::string, double>& overrides = {});

/// x^a extended as an odd function: sign(x)*|x|^a, with |x| < 1e-12
/// mapped to 0. Keeps non-integer exponents usable on sign-changing data.
double signed_pow(double x, double a);

}  // namespace sindy
