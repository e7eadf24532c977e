#include "sindy/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sindy {

double signed_pow(double x, double a) {
    if (a == 1.0) return x;
    const double ax = std::abs(x);
    if (ax < 1e-12) return 0.0;
    const double mag = std::pow(ax, a);
    return x < 0.0 ? -mag : mag;
}

std::vector<std::string> benchmark_names() {
    return {"harmonic", "vanderpol", "abc", "chemical", "pharma"};
}

namespace {

BenchmarkSystem harmonic_system() {
    BenchmarkSystem s;
    s.name = "harmonic";
    s.params = {{"a", 1.0}, {"b", 1.0}, {"c", 0.1}, {"d", 0.75}};
    s.state_names = {"x", "y"};
    s.initial_state = {-2.0, 0.0};
    s.t_end = 50.0;
    s.dt = 0.01;
    return s;
}

BenchmarkSystem vanderpol_system() {
    BenchmarkSystem s;
    s.name = "vanderpol";
    s.params = {{"mu", 0.01}, {"b", 2.15}};
    s.state_names = {"x", "y"};
    s.initial_state = {0.0, -1.0};
    s.t_end = 200.0;
    s.dt = 0.01;
    return s;
}

BenchmarkSystem abc_system() {
    using std::numbers::pi;
    BenchmarkSystem s;
    s.name = "abc";
    s.params = {{"A", 2.0},      {"B", 3.0},      {"C", 1.0},
                {"w1", pi / 2},  {"w2", pi / 2.8}, {"w3", pi / 3},
                {"w4", pi / 4},  {"w5", pi / 4.5}, {"w6", pi / 5}};
    s.state_names = {"x", "y", "z"};
    s.initial_state = {0.5, 0.2, 1.0};
    s.t_end = 20.0;
    s.dt = 0.01;
    return s;
}

BenchmarkSystem chemical_system() {
    BenchmarkSystem s;
    s.name = "chemical";
    s.params = {{"k", 0.07}, {"mu", 0.1}, {"g", 1.015}, {"h", 1.025}};
    s.state_names = {"alpha", "theta"};
    s.initial_state = {0.0, 5.0};
    s.t_end = 200.0;
    s.dt = 0.02;
    return s;
}

BenchmarkSystem pharma_system() {
    BenchmarkSystem s;
    s.name = "pharma";
    // eta is the effective exponent of t in the absorption rate k0 * t^eta.
    s.params = {{"kb", 0.15}, {"k0", 0.72}, {"eta", -0.5}};
    s.state_names = {"B", "G", "U"};
    s.initial_state = {0.0, 1.0, 0.0};
    s.dt = 0.001;
    s.t_start = s.dt;  // rate is singular at t = 0
    s.t_end = 10.0;
    return s;
}

void bind_rhs(BenchmarkSystem& s) {
    if (s.name == "harmonic") {
        const double a = s.params.at("a"), b = s.params.at("b");
        const double c = s.params.at("c"), d = s.params.at("d");
        s.rhs = [a, b, c, d](std::span<const double> x, double, std::span<double> dx) {
            dx[0] = a * x[1];
            dx[1] = -b * x[0] + c * x[1] * std::cos(d * x[0]);
        };
    } else if (s.name == "vanderpol") {
        const double mu = s.params.at("mu"), b = s.params.at("b");
        s.rhs = [mu, b](std::span<const double> x, double, std::span<double> dx) {
            dx[0] = x[1];
            dx[1] = mu * (1.0 - signed_pow(x[0], b)) * x[1] - x[0];
        };
    } else if (s.name == "abc") {
        const double A = s.params.at("A"), B = s.params.at("B"), C = s.params.at("C");
        const double w1 = s.params.at("w1"), w2 = s.params.at("w2"), w3 = s.params.at("w3");
        const double w4 = s.params.at("w4"), w5 = s.params.at("w5"), w6 = s.params.at("w6");
        s.rhs = [=](std::span<const double> x, double, std::span<double> dx) {
            dx[0] = A * std::sin(w1 * x[2]) + C * std::cos(w2 * x[1]);
            dx[1] = B * std::sin(w3 * x[0]) + A * std::cos(w4 * x[2]);
            dx[2] = C * std::sin(w5 * x[1]) + B * std::cos(w6 * x[0]);
        };
    } else if (s.name == "chemical") {
        const double k = s.params.at("k"), mu = s.params.at("mu");
        const double g = s.params.at("g"), h = s.params.at("h");
        s.rhs = [k, mu, g, h](std::span<const double> x, double, std::span<double> dx) {
            dx[0] = -k * x[0] * std::exp(g * x[1]) + mu;
            dx[1] = x[0] * std::exp(h * x[1]) - x[1];
        };
    } else if (s.name == "pharma") {
        const double kb = s.params.at("kb"), k0 = s.params.at("k0"), eta = s.params.at("eta");
        s.rhs = [kb, k0, eta](std::span<const double> x, double t, std::span<double> dx) {
            const double kg = k0 * std::pow(t, eta);
            dx[0] = kg * x[1] - kb * x[0];
            dx[1] = -kg * x[1];
            dx[2] = kb * x[0];
        };
    }
}

}  // namespace

BenchmarkSystem make_benchmark(const std::string& name,
                               const std::map<std::string, double>& overrides) {
    BenchmarkSystem s;
    if (name == "harmonic")
        s = harmonic_system();
    else if (name == "vanderpol")
        s = vanderpol_system();
    else if (name == "abc")
        s = abc_system();
    else if (name == "chemical")
        s = chemical_system();
    else if (name == "pharma")
        s = pharma_system();
    else
        throw std::invalid_argument("unknown benchmark system: " + name);

    for (const auto& [key, value] : overrides) {
        auto it = s.params.find(key);
        if (it == s.params.end())
            throw std::invalid_argument("benchmark '" + name + "' has no parameter '" + key + "'");
        it->second = value;
    }
    bind_rhs(s);
    return s;
}

}  // namespace sindy
