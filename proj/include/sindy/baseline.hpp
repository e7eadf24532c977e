#pragma once

#include <vector>

#include "sindy/library.hpp"
#include "sindy/matrix.hpp"

namespace sindy {

/// Grid values per parameter group for the classical fixed-library
/// methods. An empty list omits that family from the expansion.
struct BaselineGrids {
    std::vector<double> poly_exponents{1.0};  // exponents of x^A and the poly_pow pairs
    std::vector<double> trig_freqs;           // sin/cos and their Kronecker pairs
    std::vector<double> exp_rates;            // exp and poly_exp pairs
    std::vector<double> time_exponents;       // x * t^theta columns
    std::vector<double> rational_bandwidths;  // exp(x/(1+H x)) columns
};

/// Cartesian expansion of a parameterized dictionary blueprint: every
/// slotted column becomes one fixed column per grid value of its family
/// group; slot-free columns are copied through. The result has no
/// trainable parameters.
LibraryInstance build_fixed_library(const LibraryInstance& blueprint, const BaselineGrids& grids);

struct StlsqResult {
    Matrix coeffs;  // p x m
    bool rank_deficient = false;
    int iterations = 0;
};

/// Sequentially thresholded least squares per equation: solve on the
/// active columns with a rank-revealing QR, prune |coeff| < knob, repeat
/// until a fixed point (at most max_iter rounds).
StlsqResult stlsq(const Matrix& theta, const Matrix& dxdt, double knob, int max_iter = 20);

struct SweepRow {
    double value = 0.0;
    int support_size = 0;
    bool exact_recovery = false;
    double residual = 0.0;
};

/// A model to compare recovered coefficients against: one expected term
/// per (family, inputs, parameter) with its coefficient.
struct TruthTerm {
    Family family;
    int input = -1;
    int pair = -1;
    double coeff = 0.0;
    double param = 1.0;
    bool check_param = false;
};

/// Ground-truth support for one benchmark system, one list per equation.
std::vector<std::vector<TruthTerm>> benchmark_truth(const BenchmarkSystem& system);

/// Compares an identified model against the expected terms: the active
/// columns must match the expected support exactly, coefficients within
/// tol_coeff, nonlinear parameters within tol_param. tol_coeff < 0 checks
/// support only.
bool matches_truth(const LibraryInstance& lib, const Matrix& coeffs,
                   const std::vector<std::vector<TruthTerm>>& truth, double tol_coeff,
                   double tol_param, std::string* mismatch = nullptr);

/// Runs stlsq once per knob value, reporting support size and whether the
/// known benchmark model was recovered (support + coefficients within 1e-3).
std::vector<SweepRow> sweep_lambda(const Matrix& theta, const Matrix& dxdt,
                                   const LibraryInstance& lib,
                                   const std::vector<std::vector<TruthTerm>>& truth,
                                   const std::vector<double>& knob_values, int max_iter = 20);

}  // namespace sindy
