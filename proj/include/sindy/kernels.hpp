#pragma once

#include <span>
#include <vector>

#include "sindy/library.hpp"
#include "sindy/matrix.hpp"

namespace sindy::kernels {

/// Work order for one dictionary column: whether its value row is needed
/// and, if >= 0, where to write its parameter partial.
struct ColumnJob {
    int col = 0;
    bool want_value = true;
    int slot = -1;
};

/// Fills rows of theta_T (p x n, one row per dictionary column) and
/// dslot_T (n_slots x n) for one equation. Value and parameter partial of a
/// column are computed in one pass over the samples so sin/cos pairs share
/// their argument. Parallel over columns; output is identical for any
/// thread count since each row is written by exactly one task.
void fill_columns(const LibraryInstance& lib, int eq, const Matrix& inputs_T,
                  std::span<const double> t, std::span<const ColumnJob> jobs, Matrix& theta_T,
                  Matrix& dslot_T);

/// out[r] = sum over active columns c of coeff[c] * theta_T(c, r).
/// Parallel over row blocks; column order inside a block is fixed, so the
/// result does not depend on the thread count.
void predict(const Matrix& theta_T, std::span<const double> coeff,
             std::span<const int> active_cols, std::span<double> out);

/// out[i] = dot(rows(which[i]) of mat, v). Parallel over the requested rows.
void row_dots(const Matrix& mat, std::span<const double> v, std::span<const int> which,
              std::span<double> out);

/// Serial helpers (cheap relative to the above; kept deterministic).
double dot(std::span<const double> a, std::span<const double> b);
double sum_sq(std::span<const double> a);

/// Plain serial reference implementations used to validate and benchmark
/// the parallel kernels.
namespace ref {
void fill_columns(const LibraryInstance& lib, int eq, const Matrix& inputs_T,
                  std::span<const double> t, std::span<const ColumnJob> jobs, Matrix& theta_T,
                  Matrix& dslot_T);
void predict(const Matrix& theta_T, std::span<const double> coeff,
             std::span<const int> active_cols, std::span<double> out);
void row_dots(const Matrix& mat, std::span<const double> v, std::span<const int> which,
              std::span<double> out);
}  // namespace ref

}  // namespace sindy::kernels
