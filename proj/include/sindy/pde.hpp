#pragma once

#include <string>
#include <vector>

#include "sindy/engine.hpp"
#include "sindy/library.hpp"
#include "sindy/matrix.hpp"

namespace sindy {

struct GridSpec {
    int nx = 64, ny = 64;
    double x0 = 0.0, y0 = 0.0;
    double dx = 0.0, dy = 0.0;
};

/// One scalar field snapshot on a uniform grid, values indexed iy*nx + ix.
struct Field2D {
    GridSpec grid;
    std::vector<double> values;

    double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy * grid.nx + ix)]; }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy * grid.nx + ix)]; }
};

struct WildfireParams {
    double kappa = 1.1;           // thermal diffusivity
    double beta = 1.0;            // fuel mass fraction
    double inv_activation = 0.3;  // reaction bandwidth in exp(T / (1 + e T))
    double cooling = 0.2;         // natural heat transfer coefficient
    double wind_x = 10.0 / 1.4142135623730951;  // north-east wind, magnitude 10
    double wind_y = 10.0 / 1.4142135623730951;
    double front_cx = 8.0, front_cy = 8.0;  // initial square front
    double front_side = 4.0;
    double front_temp = 1.0;
};

/// Temperature snapshots of one simulation, uniformly spaced in time.
struct FieldSeries {
    GridSpec grid;
    WildfireParams params;
    double dt = 0.0;  // snapshot spacing
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;
};

/// Spatial derivative of 2nd-order accuracy: central stencils on the
/// interior, one-sided stencils of the same accuracy near the edges.
/// axis 0 = x, 1 = y; order in {1,2,3,4}; needs order+2 points along axis.
Field2D fd_derivative(const Field2D& field, int axis, int order);

/// Discrete right-hand side of the combustion model on the grid:
/// first-order upwind advection, central diffusion, rational-exponential
/// reaction and linear cooling, with zero-gradient (outflow) edges.
std::vector<double> wildfire_rhs(const WildfireParams& params, const GridSpec& grid,
                                 const std::vector<double>& temp);

/// Explicit 4th-order time stepping of the combustion model from a
/// Heaviside square front. Rejects dt above the stability bound
/// 0.2 * min(h^2/kappa, h/|V|); throws with the step index on blow-up.
FieldSeries simulate_wildfire(const WildfireParams& params, const GridSpec& grid, double dt,
                              double t_end, int snapshot_stride = 1);

/// Converts field snapshots into regression rows: inputs
/// [T, T_x, T_y, T_xx, T_yy, T_xxx, T_yyy, T_xxxx, T_yyyy], target dT/dt
/// from the discrete right-hand side. Points closer than the widest stencil
/// half-width (2) to an edge are excluded; rows are ordered time-major,
/// then y, then x.
RegressionProblem flatten_for_regression(const FieldSeries& series);

/// Dictionary over the flattened inputs:
/// [1, T, T_x, T_y, T_xx, T_yy, T_xxx, T_yyy, T_xxxx, T_yyyy, exp(T/(1+H T))]
/// with the reaction bandwidth H as the single trainable parameter.
LibraryInstance wildfire_library();

/// Coefficients the flattened regression recovers exactly on self-generated
/// data: the upwind advection operator equals the central first derivative
/// plus |V| h/2 times the central second derivative, so the diffusion
/// coefficients absorb that shift.
struct WildfireTruth {
    std::vector<std::pair<int, double>> coeffs;  // (library column, value)
    double bandwidth = 0.3;
};
WildfireTruth wildfire_truth(const WildfireParams& params, const GridSpec& grid);

/// CSV with header x,y,t,T, one row per grid point per snapshot.
void write_field_csv(const FieldSeries& series, const std::string& path);

}  // namespace sindy
