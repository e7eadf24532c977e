#include "sindy/baseline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sindy {

namespace {

const std::vector<double>* grid_for(Family f, const BaselineGrids& grids) {
    switch (f) {
        case Family::poly:
        case Family::poly_pow: return &grids.poly_exponents;
        case Family::sine:
        case Family::cosine:
        case Family::poly_sin:
        case Family::poly_cos: return &grids.trig_freqs;
        case Family::exponential:
        case Family::poly_exp: return &grids.exp_rates;
        case Family::time_power: return &grids.time_exponents;
        case Family::rational_exp: return &grids.rational_bandwidths;
        default: return nullptr;
    }
}

}  // namespace

LibraryInstance build_fixed_library(const LibraryInstance& blueprint, const BaselineGrids& grids) {
    LibraryInstance lib;
    lib.n_inputs = blueprint.n_inputs;
    lib.n_equations = blueprint.n_equations;
    lib.n_slots = 0;
    lib.input_names = blueprint.input_names;
    for (const CandidateSpec& spec : blueprint.specs) {
        if (!spec.has_slot()) {
            lib.specs.push_back(spec);
            continue;
        }
        const std::vector<double>* grid = grid_for(spec.family, grids);
        if (grid == nullptr) throw std::invalid_argument("build_fixed_library: family has no grid");
        for (double value : *grid) {
            CandidateSpec fixed = spec;
            fixed.slot = -1;
            fixed.fixed_param = value;
            lib.specs.push_back(fixed);
        }
    }
    lib.nl_params.resize(static_cast<std::size_t>(lib.n_equations), 0);
    return lib;
}

StlsqResult stlsq(const Matrix& theta, const Matrix& dxdt, double knob, int max_iter) {
    using MatLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VecLD = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const std::size_t n = theta.rows();
    const std::size_t p = theta.cols();
    const std::size_t m = dxdt.cols();
    if (dxdt.rows() != n) throw std::invalid_argument("stlsq: row mismatch");
    if (max_iter < 1) throw std::invalid_argument("stlsq: max_iter must be >= 1");

    // Equilibrate (so exponentials on wandering data cannot dominate the
    // pivoting) and factor in extended precision: with exact input data the
    // signal separating near-duplicate frequency columns sits around 1e-11,
    // below what a double QR resolves at condition numbers ~1e12.
    MatLD big(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    std::vector<long double> scale(p, 1.0L);
    for (std::size_t c = 0; c < p; ++c) {
        long double norm = 0.0L;
        for (std::size_t r = 0; r < n; ++r)
            norm += static_cast<long double>(theta(r, c)) * theta(r, c);
        norm = sqrtl(norm);
        if (norm > 0.0L) scale[c] = 1.0L / norm;
        for (std::size_t r = 0; r < n; ++r)
            big(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                theta(r, c) * scale[c];
    }

    StlsqResult result;
    result.coeffs.resize(p, m);
    for (std::size_t eq = 0; eq < m; ++eq) {
        VecLD target(static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) target(static_cast<Eigen::Index>(r)) = dxdt(r, eq);

        std::vector<int> active(p);
        for (std::size_t c = 0; c < p; ++c) active[c] = static_cast<int>(c);
        std::vector<double> coeff(p, 0.0);

        for (int iter = 0; iter < max_iter; ++iter) {
            result.iterations = std::max(result.iterations, iter + 1);
            if (active.empty()) break;
            MatLD sub(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(active.size()));
            for (std::size_t j = 0; j < active.size(); ++j)
                sub.col(static_cast<Eigen::Index>(j)) = big.col(active[j]);
            Eigen::ColPivHouseholderQR<MatLD> qr(sub);
            // only true duplicates fall to the pseudo-inverse path
            qr.setThreshold(static_cast<long double>(1e-16));
            if (qr.rank() < static_cast<Eigen::Index>(active.size())) result.rank_deficient = true;
            const VecLD sol = qr.solve(target);

            std::vector<int> next;
            next.reserve(active.size());
            std::fill(coeff.begin(), coeff.end(), 0.0);
            for (std::size_t j = 0; j < active.size(); ++j) {
                // back to the original column scale before pruning
                const double v = static_cast<double>(
                    sol(static_cast<Eigen::Index>(j)) *
                    scale[static_cast<std::size_t>(active[j])]);
                if (std::abs(v) < knob) continue;
                coeff[static_cast<std::size_t>(active[j])] = v;
                next.push_back(active[j]);
            }
            const bool fixed_point = next.size() == active.size();
            active.swap(next);
            if (fixed_point) break;
        }
        for (std::size_t c = 0; c < p; ++c) result.coeffs(c, eq) = coeff[c];
    }
    return result;
}

std::vector<std::vector<TruthTerm>> benchmark_truth(const BenchmarkSystem& s) {
    auto P = [&s](const char* key) { return s.params.at(key); };
    if (s.name == "harmonic") {
        return {
            {{Family::poly, 1, -1, P("a"), 1.0, false}},
            {{Family::poly, 0, -1, -P("b"), 1.0, false},
             {Family::poly_cos, 1, 0, P("c"), P("d"), true}},
        };
    }
    if (s.name == "vanderpol") {
        return {
            {{Family::poly, 1, -1, 1.0, 1.0, false}},
            {{Family::poly, 0, -1, -1.0, 1.0, false},
             {Family::poly, 1, -1, P("mu"), 1.0, false},
             {Family::poly_pow, 1, 0, -P("mu"), P("b"), true}},
        };
    }
    if (s.name == "abc") {
        return {
            {{Family::sine, 2, -1, P("A"), P("w1"), true},
             {Family::cosine, 1, -1, P("C"), P("w2"), true}},
            {{Family::sine, 0, -1, P("B"), P("w3"), true},
             {Family::cosine, 2, -1, P("A"), P("w4"), true}},
            {{Family::sine, 1, -1, P("C"), P("w5"), true},
             {Family::cosine, 0, -1, P("B"), P("w6"), true}},
        };
    }
    if (s.name == "chemical") {
        return {
            {{Family::constant, -1, -1, P("mu"), 1.0, false},
             {Family::poly_exp, 0, 1, -P("k"), P("g"), true}},
            {{Family::poly, 1, -1, -1.0, 1.0, false},
             {Family::poly_exp, 0, 1, 1.0, P("h"), true}},
        };
    }
    if (s.name == "pharma") {
        return {
            {{Family::poly, 0, -1, -P("kb"), 1.0, false},
             {Family::time_power, 1, -1, P("k0"), P("eta"), true}},
            {{Family::time_power, 1, -1, -P("k0"), P("eta"), true}},
            {{Family::poly, 0, -1, P("kb"), 1.0, false}},
        };
    }
    throw std::invalid_argument("benchmark_truth: unknown system " + s.name);
}

bool matches_truth(const LibraryInstance& lib, const Matrix& coeffs,
                   const std::vector<std::vector<TruthTerm>>& truth, double tol_coeff,
                   double tol_param, std::string* mismatch) {
    auto fail = [&](const std::string& why) {
        if (mismatch) *mismatch = why;
        return false;
    };
    if (coeffs.cols() != truth.size()) return fail("equation count mismatch");
    for (std::size_t eq = 0; eq < truth.size(); ++eq) {
        // self-adapted columns can represent a simpler term (cos(0 x) = 1,
        // y cos(0 y) = y); every active column is matched modulo that
        // degeneracy and coefficients of aliases accumulate per term
        std::vector<double> sums(truth[eq].size(), 0.0);
        std::vector<int> hits(truth[eq].size(), 0);
        for (std::size_t c = 0; c < coeffs.rows(); ++c) {
            const double v = coeffs(c, eq);
            if (v == 0.0) continue;
            const CandidateSpec& spec = lib.specs[c];
            const double param = lib.param_of(static_cast<int>(eq), spec);
            const CanonicalTerm can = canonical_term(spec, param);
            if (can.dead)
                return fail("equation " + std::to_string(eq) + ": identically-zero column " +
                            std::to_string(c) + " is active");
            bool matched = false;
            for (std::size_t k = 0; k < truth[eq].size(); ++k) {
                const TruthTerm& t = truth[eq][k];
                const CanonicalTerm want{t.family, t.input, t.pair, false, false};
                if (!can.same_shape(want)) continue;
                if (t.check_param && !can.degenerate && std::abs(param - t.param) > tol_param)
                    continue;
                sums[k] += v;
                ++hits[k];
                matched = true;
                break;
            }
            if (!matched)
                return fail("equation " + std::to_string(eq) + ": unexpected active column " +
                            std::to_string(c) + " (" + family_name(spec.family) +
                            ", coeff=" + std::to_string(v) + ", param=" + std::to_string(param) +
                            ")");
        }
        for (std::size_t k = 0; k < truth[eq].size(); ++k) {
            if (hits[k] == 0)
                return fail("equation " + std::to_string(eq) + ": missing expected term " +
                            std::to_string(k) + " (" + family_name(truth[eq][k].family) + ")");
            if (tol_coeff >= 0.0 && std::abs(sums[k] - truth[eq][k].coeff) > tol_coeff)
                return fail("equation " + std::to_string(eq) + ": term " + std::to_string(k) +
                            " coefficient " + std::to_string(sums[k]) + " vs expected " +
                            std::to_string(truth[eq][k].coeff));
        }
    }
    return true;
}

std::vector<SweepRow> sweep_lambda(const Matrix& theta, const Matrix& dxdt,
                                   const LibraryInstance& lib,
                                   const std::vector<std::vector<TruthTerm>>& truth,
                                   const std::vector<double>& knob_values, int max_iter) {
    std::vector<SweepRow> rows;
    for (double knob : knob_values) {
        const StlsqResult res = stlsq(theta, dxdt, knob, max_iter);
        SweepRow row;
        row.value = knob;
        for (std::size_t eq = 0; eq < res.coeffs.cols(); ++eq)
            for (std::size_t c = 0; c < res.coeffs.rows(); ++c)
                if (res.coeffs(c, eq) != 0.0) ++row.support_size;
        row.exact_recovery = matches_truth(lib, res.coeffs, truth, 1e-3, 1e-3);
        double rss = 0.0;
        for (std::size_t eq = 0; eq < dxdt.cols(); ++eq)
            for (std::size_t r = 0; r < theta.rows(); ++r) {
                double pred = 0.0;
                for (std::size_t c = 0; c < theta.cols(); ++c)
                    pred += theta(r, c) * res.coeffs(c, eq);
                const double d = dxdt(r, eq) - pred;
                rss += d * d;
            }
        row.residual = rss;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sindy
