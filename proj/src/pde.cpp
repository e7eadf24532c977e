#include "sindy/pde.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sindy {

namespace {

int halfwidth(int order) { return order <= 2 ? 1 : 2; }

// 2nd-order stencils along one line of samples.
void derive_line(const double* f, int n, int stride, double h, int order, double* out,
                 int out_stride) {
    auto F = [&](int i) { return f[i * stride]; };
    const int hw = halfwidth(order);
    const int pts = order + 2;  // one-sided stencil length
    for (int i = 0; i < n; ++i) {
        double v = 0.0;
        if (i >= hw && i < n - hw) {
            switch (order) {
                case 1: v = (F(i + 1) - F(i - 1)) / (2.0 * h); break;
                case 2: v = (F(i - 1) - 2.0 * F(i) + F(i + 1)) / (h * h); break;
                case 3:
                    v = (F(i + 2) - 2.0 * F(i + 1) + 2.0 * F(i - 1) - F(i - 2)) /
                        (2.0 * h * h * h);
                    break;
                case 4:
                    v = (F(i + 2) - 4.0 * F(i + 1) + 6.0 * F(i) - 4.0 * F(i - 1) + F(i - 2)) /
                        (h * h * h * h);
                    break;
            }
        } else if (i + pts <= n && i < n - hw) {
            // forward one-sided (left edge)
            switch (order) {
                case 1: v = (-3.0 * F(i) + 4.0 * F(i + 1) - F(i + 2)) / (2.0 * h); break;
                case 2:
                    v = (2.0 * F(i) - 5.0 * F(i + 1) + 4.0 * F(i + 2) - F(i + 3)) / (h * h);
                    break;
                case 3:
                    v = (-5.0 * F(i) + 18.0 * F(i + 1) - 24.0 * F(i + 2) + 14.0 * F(i + 3) -
                         3.0 * F(i + 4)) /
                        (2.0 * h * h * h);
                    break;
                case 4:
                    v = (3.0 * F(i) - 14.0 * F(i + 1) + 26.0 * F(i + 2) - 24.0 * F(i + 3) +
                         11.0 * F(i + 4) - 2.0 * F(i + 5)) /
                        (h * h * h * h);
                    break;
            }
        } else {
            // backward one-sided (right edge): mirror, odd orders flip sign
            const double s = order % 2 == 0 ? 1.0 : -1.0;
            switch (order) {
                case 1: v = s * (-3.0 * F(i) + 4.0 * F(i - 1) - F(i - 2)) / (2.0 * h); break;
                case 2:
                    v = (2.0 * F(i) - 5.0 * F(i - 1) + 4.0 * F(i - 2) - F(i - 3)) / (h * h);
                    break;
                case 3:
                    v = s *
                        (-5.0 * F(i) + 18.0 * F(i - 1) - 24.0 * F(i - 2) + 14.0 * F(i - 3) -
                         3.0 * F(i - 4)) /
                        (2.0 * h * h * h);
                    break;
                case 4:
                    v = (3.0 * F(i) - 14.0 * F(i - 1) + 26.0 * F(i - 2) - 24.0 * F(i - 3) +
                         11.0 * F(i - 4) - 2.0 * F(i - 5)) /
                        (h * h * h * h);
                    break;
            }
        }
        out[i * out_stride] = v;
    }
}

}  // namespace

Field2D fd_derivative(const Field2D& field, int axis, int order) {
    if (order < 1 || order > 4) throw std::invalid_argument("fd_derivative: order must be 1..4");
    if (axis != 0 && axis != 1) throw std::invalid_argument("fd_derivative: axis must be 0 or 1");
    const int nx = field.grid.nx, ny = field.grid.ny;
    const int n_axis = axis == 0 ? nx : ny;
    if (n_axis < order + 2)
        throw std::invalid_argument("fd_derivative: grid too small for requested order");

    Field2D out;
    out.grid = field.grid;
    out.values.resize(field.values.size());
    if (axis == 0) {
#pragma omp parallel for schedule(static)
        for (int iy = 0; iy < ny; ++iy)
            derive_line(field.values.data() + static_cast<std::size_t>(iy) * nx, nx, 1,
                        field.grid.dx, order, out.values.data() + static_cast<std::size_t>(iy) * nx,
                        1);
    } else {
#pragma omp parallel for schedule(static)
        for (int ix = 0; ix < nx; ++ix)
            derive_line(field.values.data() + ix, ny, nx, field.grid.dy, order,
                        out.values.data() + ix, nx);
    }
    return out;
}

std::vector<double> wildfire_rhs(const WildfireParams& p, const GridSpec& grid,
                                 const std::vector<double>& temp) {
    const int nx = grid.nx, ny = grid.ny;
    std::vector<double> out(temp.size());
    const double inv_dx = 1.0 / grid.dx, inv_dy = 1.0 / grid.dy;
    const double inv_dx2 = inv_dx * inv_dx, inv_dy2 = inv_dy * inv_dy;
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            auto T = [&](int jx, int jy) {
                // zero-gradient edges: clamp the index
                jx = jx < 0 ? 0 : (jx >= nx ? nx - 1 : jx);
                jy = jy < 0 ? 0 : (jy >= ny ? ny - 1 : jy);
                return temp[static_cast<std::size_t>(jy * nx + jx)];
            };
            const double c = T(ix, iy);
            double adv = 0.0;
            if (p.wind_x > 0.0)
                adv += p.wind_x * (c - T(ix - 1, iy)) * inv_dx;
            else if (p.wind_x < 0.0)
                adv += p.wind_x * (T(ix + 1, iy) - c) * inv_dx;
            if (p.wind_y > 0.0)
                adv += p.wind_y * (c - T(ix, iy - 1)) * inv_dy;
            else if (p.wind_y < 0.0)
                adv += p.wind_y * (T(ix, iy + 1) - c) * inv_dy;
            const double lap = (T(ix - 1, iy) - 2.0 * c + T(ix + 1, iy)) * inv_dx2 +
                               (T(ix, iy - 1) - 2.0 * c + T(ix, iy + 1)) * inv_dy2;
            const double reaction = p.beta * std::exp(c / (1.0 + p.inv_activation * c));
            out[static_cast<std::size_t>(iy * nx + ix)] =
                -adv + p.kappa * lap + reaction - p.cooling * c;
        }
    }
    return out;
}

FieldSeries simulate_wildfire(const WildfireParams& params, const GridSpec& grid_in, double dt,
                              double t_end, int snapshot_stride) {
    GridSpec grid = grid_in;
    if (grid.nx < 8 || grid.ny < 8) throw std::invalid_argument("simulate_wildfire: grid too small");
    if (grid.dx <= 0.0 || grid.dy <= 0.0)
        throw std::invalid_argument("simulate_wildfire: grid spacing must be positive");
    if (dt <= 0.0 || t_end <= 0.0)
        throw std::invalid_argument("simulate_wildfire: dt and t_end must be positive");
    if (snapshot_stride < 1)
        throw std::invalid_argument("simulate_wildfire: snapshot stride must be >= 1");

    const double h = std::min(grid.dx, grid.dy);
    const double wind_mag = std::hypot(params.wind_x, params.wind_y);
    double bound = std::numeric_limits<double>::infinity();
    if (params.kappa > 0.0) bound = std::min(bound, 0.2 * h * h / params.kappa);
    if (wind_mag > 0.0) bound = std::min(bound, 0.2 * h / wind_mag);
    if (dt > bound)
        throw std::invalid_argument("simulate_wildfire: dt violates the stability bound " +
                                    std::to_string(bound));

    const int nx = grid.nx, ny = grid.ny;
    std::vector<double> temp(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int iy = 0; iy < ny; ++iy) {
        const double y = grid.y0 + iy * grid.dy;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = grid.x0 + ix * grid.dx;
            if (std::abs(x - params.front_cx) <= params.front_side / 2.0 &&
                std::abs(y - params.front_cy) <= params.front_side / 2.0)
                temp[static_cast<std::size_t>(iy * nx + ix)] = params.front_temp;
        }
    }

    FieldSeries series;
    series.grid = grid;
    series.params = params;
    series.dt = dt * snapshot_stride;
    series.times.push_back(0.0);
    series.snapshots.push_back(temp);

    const auto n_steps = static_cast<long>(std::llround(t_end / dt));
    const std::size_t cells = temp.size();
    std::vector<double> stage(cells);
    for (long step = 1; step <= n_steps; ++step) {
        const std::vector<double> k1 = wildfire_rhs(params, grid, temp);
        for (std::size_t i = 0; i < cells; ++i) stage[i] = temp[i] + 0.5 * dt * k1[i];
        const std::vector<double> k2 = wildfire_rhs(params, grid, stage);
        for (std::size_t i = 0; i < cells; ++i) stage[i] = temp[i] + 0.5 * dt * k2[i];
        const std::vector<double> k3 = wildfire_rhs(params, grid, stage);
        for (std::size_t i = 0; i < cells; ++i) stage[i] = temp[i] + dt * k3[i];
        const std::vector<double> k4 = wildfire_rhs(params, grid, stage);
        for (std::size_t i = 0; i < cells; ++i) {
            temp[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(temp[i]))
                throw std::runtime_error("simulate_wildfire: blow-up at step " +
                                         std::to_string(step));
        }
        if (step % snapshot_stride == 0) {
            series.times.push_back(static_cast<double>(step) * dt);
            series.snapshots.push_back(temp);
        }
    }
    return series;
}

RegressionProblem flatten_for_regression(const FieldSeries& series) {
    constexpr int margin = 2;  // widest stencil half-width
    const int nx = series.grid.nx, ny = series.grid.ny;
    if (nx <= 2 * margin || ny <= 2 * margin)
        throw std::invalid_argument("flatten_for_regression: grid too small");
    const std::size_t per_snap = static_cast<std::size_t>(nx - 2 * margin) *
                                 static_cast<std::size_t>(ny - 2 * margin);
    const std::size_t rows = per_snap * series.snapshots.size();

    RegressionProblem prob;
    prob.inputs.resize(rows, 9);
    prob.targets.resize(rows, 1);
    prob.t.resize(rows);
    prob.target_names = {"T"};

    std::size_t row = 0;
    for (std::size_t s = 0; s < series.snapshots.size(); ++s) {
        Field2D field{series.grid, series.snapshots[s]};
        const Field2D d[8] = {fd_derivative(field, 0, 1), fd_derivative(field, 1, 1),
                              fd_derivative(field, 0, 2), fd_derivative(field, 1, 2),
                              fd_derivative(field, 0, 3), fd_derivative(field, 1, 3),
                              fd_derivative(field, 0, 4), fd_derivative(field, 1, 4)};
        const std::vector<double> ddt = wildfire_rhs(series.params, series.grid, field.values);
        for (int iy = margin; iy < ny - margin; ++iy)
            for (int ix = margin; ix < nx - margin; ++ix, ++row) {
                prob.inputs(row, 0) = field.at(ix, iy);
                for (int k = 0; k < 8; ++k) prob.inputs(row, static_cast<std::size_t>(k + 1)) =
                    d[k].at(ix, iy);
                prob.targets(row, 0) = ddt[static_cast<std::size_t>(iy * nx + ix)];
                prob.t[row] = series.times[s];
            }
    }
    return prob;
}

LibraryInstance wildfire_library() {
    LibraryInstance lib;
    lib.n_inputs = 9;
    lib.n_equations = 1;
    lib.input_names = {"T", "T_x", "T_y", "T_xx", "T_yy", "T_xxx", "T_yyy", "T_xxxx", "T_yyyy"};
    lib.specs.push_back({.family = Family::constant});
    lib.specs.push_back({.family = Family::poly, .input = 0});
    const int axis_of[8] = {0, 1, 0, 1, 0, 1, 0, 1};
    const int order_of[8] = {1, 1, 2, 2, 3, 3, 4, 4};
    for (int k = 0; k < 8; ++k)
        lib.specs.push_back({.family = Family::spatial_deriv,
                             .input = k + 1,
                             .deriv_axis = axis_of[k],
                             .deriv_order = order_of[k]});
    lib.specs.push_back({.family = Family::rational_exp, .input = 0, .slot = 0});
    lib.n_slots = 1;
    lib.nl_params.resize(1, 1, 1.0);
    return lib;
}

WildfireTruth wildfire_truth(const WildfireParams& p, const GridSpec& grid) {
    // library columns: 0=1, 1=T, 2=T_x, 3=T_y, 4=T_xx, 5=T_yy, ..., 10=exp
    WildfireTruth truth;
    truth.bandwidth = p.inv_activation;
    truth.coeffs = {
        {1, -p.cooling},
        {2, -p.wind_x},
        {3, -p.wind_y},
        {4, p.kappa + std::abs(p.wind_x) * grid.dx / 2.0},
        {5, p.kappa + std::abs(p.wind_y) * grid.dy / 2.0},
        {10, p.beta},
    };
    return truth;
}

void write_field_csv(const FieldSeries& series, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "x,y,t,T\n";
    char buf[128];
    for (std::size_t s = 0; s < series.snapshots.size(); ++s)
        for (int iy = 0; iy < series.grid.ny; ++iy)
            for (int ix = 0; ix < series.grid.nx; ++ix) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                              series.grid.x0 + ix * series.grid.dx,
                              series.grid.y0 + iy * series.grid.dy, series.times[s],
                              series.snapshots[s][static_cast<std::size_t>(iy * series.grid.nx +
                                                                           ix)]);
                f << buf;
            }
}

}  // namespace sindy
