#include "sindy/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sindy {

void validate(const Trajectory& traj) {
    const std::size_t n = traj.times.size();
    if (n == 0) throw std::invalid_argument("trajectory: no samples");
    if (traj.states.rows() != n || traj.derivatives.rows() != n ||
        traj.states.cols() != traj.derivatives.cols())
        throw std::invalid_argument("trajectory: shape mismatch between times/states/derivatives");
    if (n >= 2) {
        const double dt = traj.times[1] - traj.times[0];
        if (dt <= 0.0) throw std::invalid_argument("trajectory: times not strictly increasing");
        for (std::size_t i = 1; i < n; ++i) {
            const double step = traj.times[i] - traj.times[i - 1];
            if (step <= 0.0) throw std::invalid_argument("trajectory: times not strictly increasing");
            if (std::abs(step - dt) > 1e-12 * std::max(std::abs(dt), 1.0))
                throw std::invalid_argument("trajectory: non-uniform time spacing");
        }
    }
    for (double v : traj.states.flat())
        if (!std::isfinite(v)) throw std::invalid_argument("trajectory: non-finite state entry");
    for (double v : traj.derivatives.flat())
        if (!std::isfinite(v)) throw std::invalid_argument("trajectory: non-finite derivative entry");
}

std::string to_csv(const Trajectory& traj) {
    std::string out;
    const std::size_t m = traj.states.cols();
    out += "t";
    for (std::size_t j = 0; j < m; ++j) out += ",x" + std::to_string(j + 1);
    for (std::size_t j = 0; j < m; ++j) out += ",dx" + std::to_string(j + 1);
    out += "\n";
    char buf[40];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
        out += buf;
        for (std::size_t j = 0; j < m; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", traj.states(i, j));
            out += buf;
        }
        for (std::size_t j = 0; j < m; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", traj.derivatives(i, j));
            out += buf;
        }
        out += "\n";
    }
    return out;
}

void write_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << to_csv(traj);
}

Trajectory read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::string header;
    if (!std::getline(f, header)) throw std::runtime_error("empty trajectory csv: " + path);
    std::size_t cols = 1;
    for (char c : header)
        if (c == ',') ++cols;
    if (cols < 3 || (cols - 1) % 2 != 0)
        throw std::runtime_error("malformed trajectory header: " + header);
    const std::size_t m = (cols - 1) / 2;

    std::vector<double> values;
    std::string line;
    std::size_t n = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t got = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++got;
        }
        if (got != cols) throw std::runtime_error("malformed trajectory row: " + line);
        ++n;
    }
    Trajectory traj;
    traj.times.resize(n);
    traj.states.resize(n, m);
    traj.derivatives.resize(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = values.data() + i * cols;
        traj.times[i] = row[0];
        for (std::size_t j = 0; j < m; ++j) traj.states(i, j) = row[1 + j];
        for (std::size_t j = 0; j < m; ++j) traj.derivatives(i, j) = row[1 + m + j];
    }
    for (std::size_t j = 0; j < m; ++j) traj.state_names.push_back("x" + std::to_string(j + 1));
    return traj;
}

}  // namespace sindy
