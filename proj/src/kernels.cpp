#include "sindy/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace sindy::kernels {

namespace {

// One column's value/partial pass over a sample range. Kept in a single
// loop per column so the compiler can fuse sin/cos of the shared argument.
void run_job(const LibraryInstance& lib, int eq, const Matrix& inputs_T,
             std::span<const double> t, const ColumnJob& job, Matrix& theta_T, Matrix& dslot_T) {
    const CandidateSpec& spec = lib.specs[static_cast<std::size_t>(job.col)];
    const double param = lib.param_of(eq, spec);
    const std::size_t n = inputs_T.cols();
    const double* xi = spec.input >= 0 ? inputs_T.row_ptr(static_cast<std::size_t>(spec.input))
                                       : nullptr;
    const double* xk = spec.pair >= 0 ? inputs_T.row_ptr(static_cast<std::size_t>(spec.pair))
                                      : nullptr;
    double* value = job.want_value ? theta_T.row_ptr(static_cast<std::size_t>(job.col)) : nullptr;
    double* dparam = job.slot >= 0 ? dslot_T.row_ptr(static_cast<std::size_t>(job.slot)) : nullptr;

    for (std::size_t r = 0; r < n; ++r) {
        const double a = xi ? xi[r] : 0.0;
        const double b = xk ? xk[r] : 0.0;
        const double tv = t.empty() ? 0.0 : t[r];
        if (value) value[r] = detail::family_value(spec.family, a, b, tv, param);
        if (dparam) dparam[r] = detail::family_dparam(spec.family, a, b, tv, param);
    }
}

}  // namespace

void fill_columns(const LibraryInstance& lib, int eq, const Matrix& inputs_T,
                  std::span<const double> t, std::span<const ColumnJob> jobs, Matrix& theta_T,
                  Matrix& dslot_T) {
    const auto njobs = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < njobs; ++i)
        run_job(lib, eq, inputs_T, t, jobs[static_cast<std::size_t>(i)], theta_T, dslot_T);
}

void predict(const Matrix& theta_T, std::span<const double> coeff,
             std::span<const int> active_cols, std::span<double> out) {
    const std::size_t n = out.size();
    constexpr std::size_t block = 2048;
    const auto nblocks = static_cast<long>((n + block - 1) / block);
#pragma omp parallel for schedule(static)
    for (long bi = 0; bi < nblocks; ++bi) {
        const std::size_t lo = static_cast<std::size_t>(bi) * block;
        const std::size_t hi = std::min(lo + block, n);
        std::fill(out.begin() + static_cast<long>(lo), out.begin() + static_cast<long>(hi), 0.0);
        for (int c : active_cols) {
            const double w = coeff[static_cast<std::size_t>(c)];
            const double* row = theta_T.row_ptr(static_cast<std::size_t>(c));
            for (std::size_t r = lo; r < hi; ++r) out[r] += w * row[r];
        }
    }
}

void row_dots(const Matrix& mat, std::span<const double> v, std::span<const int> which,
              std::span<double> out) {
    assert(out.size() == which.size());
    const auto k = static_cast<long>(which.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < k; ++i) {
        const double* row = mat.row_ptr(static_cast<std::size_t>(which[static_cast<std::size_t>(i)]));
        double acc = 0.0;
        for (std::size_t r = 0; r < v.size(); ++r) acc += row[r] * v[r];
        out[static_cast<std::size_t>(i)] = acc;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sum_sq(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += v * v;
    return acc;
}

namespace ref {

void fill_columns(const LibraryInstance& lib, int eq, const Matrix& inputs_T,
                  std::span<const double> t, std::span<const ColumnJob> jobs, Matrix& theta_T,
                  Matrix& dslot_T) {
    for (const ColumnJob& job : jobs) run_job(lib, eq, inputs_T, t, job, theta_T, dslot_T);
}

void predict(const Matrix& theta_T, std::span<const double> coeff,
             std::span<const int> active_cols, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int c : active_cols) {
        const double w = coeff[static_cast<std::size_t>(c)];
        const double* row = theta_T.row_ptr(static_cast<std::size_t>(c));
        for (std::size_t r = 0; r < out.size(); ++r) out[r] += w * row[r];
    }
}

void row_dots(const Matrix& mat, std::span<const double> v, std::span<const int> which,
              std::span<double> out) {
    for (std::size_t i = 0; i < which.size(); ++i) {
        const double* row = mat.row_ptr(static_cast<std::size_t>(which[i]));
        double acc = 0.0;
        for (std::size_t r = 0; r < v.size(); ++r) acc += row[r] * v[r];
        out[i] = acc;
    }
}

}  // namespace ref

}  // namespace sindy::kernels
