#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sindy/benchmarks.hpp"
#include "sindy/matrix.hpp"

namespace sindy {

/// Candidate function families. The "poly_*" families are column-wise
/// Kronecker products of a linear state factor with a parameterized
/// function of a (possibly equal) second state.
enum class Family {
    constant,      // 1
    poly,          // x^A        (A fixed at 1 unless trainable)
    sine,          // sin(B x)
    cosine,        // cos(C x)
    exponential,   // exp(D x)
    poly_sin,      // x_i * sin(E x_k)
    poly_cos,      // x_i * cos(F x_k)
    poly_exp,      // x_i * exp(G x_k)
    poly_pow,      // x_i * x_k^A
    time_power,    // x_i * t^theta
    rational_exp,  // exp(x / (1 + H x))
    spatial_deriv  // precomputed derivative column, passed through
};

const char* family_name(Family f);

/// One candidate column: the family, which state column(s) it reads, and
/// either a per-equation trainable parameter slot or a baked-in value.
struct CandidateSpec {
    Family family = Family::constant;
    int input = -1;        // first state column
    int pair = -1;         // second state column (Kronecker families)
    int slot = -1;         // index into the trainable parameter row, -1 if fixed
    double fixed_param = 1.0;
    int deriv_axis = -1;   // spatial_deriv bookkeeping only
    int deriv_order = 0;

    bool has_slot() const { return slot >= 0; }
};

/// The parameterized candidate dictionary. `nl_params` holds one row of
/// trainable nonlinear parameters per target equation, so each equation
/// evaluates the dictionary with its own frequencies/exponents/rates.
struct LibraryInstance {
    std::vector<CandidateSpec> specs;
    Matrix nl_params;  // n_equations x n_slots
    int n_inputs = 0;
    int n_equations = 0;
    int n_slots = 0;
    std::vector<std::string> input_names;

    int columns() const { return static_cast<int>(specs.size()); }
    double param_of(int eq, const CandidateSpec& spec) const {
        return spec.has_slot() ? nl_params(static_cast<std::size_t>(eq),
                                           static_cast<std::size_t>(spec.slot))
                               : spec.fixed_param;
    }
};

struct MasterLibraryOptions {
    bool trainable_poly_exponent = false;  // make the x^A exponent a slot
    bool include_poly_pow = false;         // x_i * x_k^A cross-power pairs
    bool include_time_power = false;       // x_i * t^theta columns
    bool include_rational_exp = false;     // exp(x / (1 + H x)) columns
};

/// Builds the master dictionary over m states: constant, per-state powers,
/// sin/cos/exp, and the Kronecker families over every ordered state pair
/// (self-pairs included). Column order is fixed:
///   1, x_1^A..x_m^A, sin, cos, exp, poly_sin pairs (row-major), poly_cos,
///   poly_exp, [poly_pow pairs], [time_power per state], [rational_exp per state]
/// All trainable parameters start at 1.
LibraryInstance master_library(int m, const MasterLibraryOptions& opts = {});

/// Evaluates the dictionary for one equation: column j of the result is
/// spec j applied with that equation's parameters. Throws on non-finite
/// output (reporting row and column) and on t <= 0 for time_power columns.
Matrix evaluate(const LibraryInstance& lib, int eq, const Matrix& X,
                std::span<const double> t = {});

/// Analytic partial of each column with respect to its trainable parameter,
/// laid out per slot: column s of the result is d(column using slot s)/d(slot).
Matrix d_theta_d_lambda(const LibraryInstance& lib, int eq, const Matrix& X,
                        std::span<const double> t = {});

/// Analytic partial of every column with respect to state `state`.
/// Unsupported for dictionaries containing spatial_deriv columns.
Matrix d_theta_d_x(const LibraryInstance& lib, int eq, const Matrix& X,
                   std::span<const double> t, int state);

/// Human-readable rendering of column `col` for equation `eq`, using the
/// instance's input names and the current parameter value.
std::string term_name(const LibraryInstance& lib, int eq, int col,
                      const std::vector<std::string>& names);

/// One record per column: family, inputs, slot, current parameter value.
std::string describe(const LibraryInstance& lib, int eq);

/// A column's identity modulo parameter degeneracies: with its parameter at
/// exactly zero a cosine or exponential column is the constant column, the
/// Kronecker cos/exp and time-power columns collapse onto the plain state
/// column, and sine columns are identically zero (dead).
struct CanonicalTerm {
    Family family = Family::constant;
    int input = -1;
    int pair = -1;
    bool dead = false;
    bool degenerate = false;  // parameter vanished; an alias of a simpler column

    bool same_shape(const CanonicalTerm& o) const {
        return family == o.family && input == o.input && pair == o.pair;
    }
};

CanonicalTerm canonical_term(const CandidateSpec& spec, double param);

namespace detail {

// Scalar core shared by evaluate(), the gradient routines and the fused
// engine kernels. xi = first input, xk = pair input, p = parameter.

inline double family_value(Family f, double xi, double xk, double t, double p) {
    switch (f) {
        case Family::constant: return 1.0;
        case Family::poly: return signed_pow(xi, p);
        case Family::sine: return std::sin(p * xi);
        case Family::cosine: return std::cos(p * xi);
        case Family::exponential: return std::exp(p * xi);
        case Family::poly_sin: return xi * std::sin(p * xk);
        case Family::poly_cos: return xi * std::cos(p * xk);
        case Family::poly_exp: return xi * std::exp(p * xk);
        case Family::poly_pow: return xi * signed_pow(xk, p);
        case Family::time_power: return xi * std::pow(t, p);
        case Family::rational_exp: return std::exp(xi / (1.0 + p * xi));
        case Family::spatial_deriv: return xi;
    }
    return 0.0;
}

inline double family_dparam(Family f, double xi, double xk, double t, double p) {
    switch (f) {
        case Family::constant:
        case Family::spatial_deriv: return 0.0;
        case Family::poly: {
            const double ax = std::abs(xi);
            if (ax < 1e-12) return 0.0;
            return signed_pow(xi, p) * std::log(ax);
        }
        case Family::sine: return xi * std::cos(p * xi);
        case Family::cosine: return -xi * std::sin(p * xi);
        case Family::exponential: return xi * std::exp(p * xi);
        case Family::poly_sin: return xi * xk * std::cos(p * xk);
        case Family::poly_cos: return -xi * xk * std::sin(p * xk);
        case Family::poly_exp: return xi * xk * std::exp(p * xk);
        case Family::poly_pow: {
            const double ax = std::abs(xk);
            if (ax < 1e-12) return 0.0;
            return xi * signed_pow(xk, p) * std::log(ax);
        }
        case Family::time_power: return xi * std::pow(t, p) * std::log(t);
        case Family::rational_exp: {
            const double den = 1.0 + p * xi;
            return -(xi * xi) / (den * den) * std::exp(xi / den);
        }
    }
    return 0.0;
}

// d(signed_pow(x, a))/dx = a |x|^(a-1); exactly 1 when a == 1, 0 inside the
// |x| < 1e-12 dead zone.
inline double signed_pow_dx(double x, double a) {
    if (a == 1.0) return 1.0;
    const double ax = std::abs(x);
    if (ax < 1e-12) return 0.0;
    return a * std::pow(ax, a - 1.0);
}

// Partial with respect to the first input column.
inline double family_dxi(Family f, double xi, double xk, double t, double p) {
    switch (f) {
        case Family::constant: return 0.0;
        case Family::poly: return signed_pow_dx(xi, p);
        case Family::sine: return p * std::cos(p * xi);
        case Family::cosine: return -p * std::sin(p * xi);
        case Family::exponential: return p * std::exp(p * xi);
        case Family::poly_sin: return std::sin(p * xk);
        case Family::poly_cos: return std::cos(p * xk);
        case Family::poly_exp: return std::exp(p * xk);
        case Family::poly_pow: return signed_pow(xk, p);
        case Family::time_power: return std::pow(t, p);
        case Family::rational_exp: {
            const double den = 1.0 + p * xi;
            return std::exp(xi / den) / (den * den);
        }
        case Family::spatial_deriv: return 0.0;  // guarded by the caller
    }
    return 0.0;
}

// Partial with respect to the pair input column (Kronecker families only).
inline double family_dxk(Family f, double xi, double xk, double, double p) {
    switch (f) {
        case Family::poly_sin: return xi * p * std::cos(p * xk);
        case Family::poly_cos: return -xi * p * std::sin(p * xk);
        case Family::poly_exp: return xi * p * std::exp(p * xk);
        case Family::poly_pow: return xi * signed_pow_dx(xk, p);
        default: return 0.0;
    }
}

}  // namespace detail

}  // namespace sindy
