#include "sindy/library.hpp"

#include <cstdio>
#include <stdexcept>

namespace sindy {

const char* family_name(Family f) {
    switch (f) {
        case Family::constant: return "constant";
        case Family::poly: return "poly";
        case Family::sine: return "sin";
        case Family::cosine: return "cos";
        case Family::exponential: return "exp";
        case Family::poly_sin: return "poly_sin";
        case Family::poly_cos: return "poly_cos";
        case Family::poly_exp: return "poly_exp";
        case Family::poly_pow: return "poly_pow";
        case Family::time_power: return "time_power";
        case Family::rational_exp: return "rational_exp";
        case Family::spatial_deriv: return "spatial_deriv";
    }
    return "?";
}

LibraryInstance master_library(int m, const MasterLibraryOptions& opts) {
    if (m < 1) throw std::invalid_argument("master_library: need at least one state");

    LibraryInstance lib;
    lib.n_inputs = m;
    lib.n_equations = m;
    int next_slot = 0;
    auto add = [&lib](CandidateSpec spec) { lib.specs.push_back(spec); };

    add({.family = Family::constant});
    for (int i = 0; i < m; ++i) {
        CandidateSpec s{.family = Family::poly, .input = i};
        if (opts.trainable_poly_exponent) s.slot = next_slot++;
        add(s);
    }
    for (int i = 0; i < m; ++i)
        add({.family = Family::sine, .input = i, .slot = next_slot++});
    for (int i = 0; i < m; ++i)
        add({.family = Family::cosine, .input = i, .slot = next_slot++});
    for (int i = 0; i < m; ++i)
        add({.family = Family::exponential, .input = i, .slot = next_slot++});
    for (Family f : {Family::poly_sin, Family::poly_cos, Family::poly_exp})
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k)
                add({.family = f, .input = i, .pair = k, .slot = next_slot++});
    if (opts.include_poly_pow)
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k)
                add({.family = Family::poly_pow, .input = i, .pair = k, .slot = next_slot++});
    if (opts.include_time_power)
        for (int i = 0; i < m; ++i)
            add({.family = Family::time_power, .input = i, .slot = next_slot++});
    if (opts.include_rational_exp)
        for (int i = 0; i < m; ++i)
            add({.family = Family::rational_exp, .input = i, .slot = next_slot++});

    lib.n_slots = next_slot;
    lib.nl_params.resize(static_cast<std::size_t>(m), static_cast<std::size_t>(next_slot), 1.0);
    for (int i = 0; i < m; ++i) lib.input_names.push_back("x" + std::to_string(i + 1));
    return lib;
}

namespace {

bool needs_time(const LibraryInstance& lib) {
    for (const auto& s : lib.specs)
        if (s.family == Family::time_power) return true;
    return false;
}

void check_args(const LibraryInstance& lib, int eq, const Matrix& X, std::span<const double> t) {
    if (eq < 0 || eq >= lib.n_equations)
        throw std::invalid_argument("library: equation index out of range");
    if (static_cast<int>(X.cols()) != lib.n_inputs)
        throw std::invalid_argument("library: X has wrong number of columns");
    if (needs_time(lib)) {
        if (t.size() != X.rows())
            throw std::invalid_argument("library: time column required for time_power");
        for (double v : t)
            if (v <= 0.0)
                throw std::domain_error("library: time_power requires t > 0");
    }
}

}  // namespace

Matrix evaluate(const LibraryInstance& lib, int eq, const Matrix& X, std::span<const double> t) {
    check_args(lib, eq, X, t);
    const std::size_t n = X.rows();
    const std::size_t p = lib.specs.size();
    Matrix out(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        const CandidateSpec& spec = lib.specs[j];
        const double param = lib.param_of(eq, spec);
        for (std::size_t r = 0; r < n; ++r) {
            const double xi = spec.input >= 0 ? X(r, static_cast<std::size_t>(spec.input)) : 0.0;
            const double xk = spec.pair >= 0 ? X(r, static_cast<std::size_t>(spec.pair)) : 0.0;
            const double tv = t.empty() ? 0.0 : t[r];
            const double v = detail::family_value(spec.family, xi, xk, tv, param);
            if (!std::isfinite(v))
                throw std::runtime_error("library: non-finite value in column " +
                                         std::to_string(j) + " at row " + std::to_string(r));
            out(r, j) = v;
        }
    }
    return out;
}

Matrix d_theta_d_lambda(const LibraryInstance& lib, int eq, const Matrix& X,
                        std::span<const double> t) {
    check_args(lib, eq, X, t);
    const std::size_t n = X.rows();
    Matrix out(n, static_cast<std::size_t>(lib.n_slots));
    for (const CandidateSpec& spec : lib.specs) {
        if (!spec.has_slot()) continue;
        const double param = lib.param_of(eq, spec);
        const auto s = static_cast<std::size_t>(spec.slot);
        for (std::size_t r = 0; r < n; ++r) {
            const double xi = X(r, static_cast<std::size_t>(spec.input));
            const double xk = spec.pair >= 0 ? X(r, static_cast<std::size_t>(spec.pair)) : 0.0;
            const double tv = t.empty() ? 0.0 : t[r];
            out(r, s) = detail::family_dparam(spec.family, xi, xk, tv, param);
        }
    }
    return out;
}

Matrix d_theta_d_x(const LibraryInstance& lib, int eq, const Matrix& X,
                   std::span<const double> t, int state) {
    check_args(lib, eq, X, t);
    if (state < 0 || state >= lib.n_inputs)
        throw std::invalid_argument("d_theta_d_x: state index out of range");
    const std::size_t n = X.rows();
    const std::size_t p = lib.specs.size();
    Matrix out(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        const CandidateSpec& spec = lib.specs[j];
        if (spec.family == Family::spatial_deriv)
            throw std::invalid_argument("d_theta_d_x: spatial_deriv columns unsupported");
        const double param = lib.param_of(eq, spec);
        const bool on_input = spec.input == state;
        const bool on_pair = spec.pair == state;
        if (!on_input && !on_pair) continue;
        for (std::size_t r = 0; r < n; ++r) {
            const double xi = spec.input >= 0 ? X(r, static_cast<std::size_t>(spec.input)) : 0.0;
            const double xk = spec.pair >= 0 ? X(r, static_cast<std::size_t>(spec.pair)) : 0.0;
            const double tv = t.empty() ? 0.0 : t[r];
            double d = 0.0;
            if (on_input) d += detail::family_dxi(spec.family, xi, xk, tv, param);
            if (on_pair) d += detail::family_dxk(spec.family, xi, xk, tv, param);
            out(r, j) = d;
        }
    }
    return out;
}

std::string term_name(const LibraryInstance& lib, int eq, int col,
                      const std::vector<std::string>& names) {
    const CandidateSpec& spec = lib.specs[static_cast<std::size_t>(col)];
    auto name = [&](int idx) -> std::string {
        if (idx < 0) return "?";
        if (idx < static_cast<int>(names.size())) return names[static_cast<std::size_t>(idx)];
        return "x" + std::to_string(idx + 1);
    };
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    const double p = lib.param_of(eq, spec);
    switch (spec.family) {
        case Family::constant: return "1";
        case Family::poly:
            return p == 1.0 ? name(spec.input) : name(spec.input) + "^" + fmt(p);
        case Family::sine: return "sin(" + fmt(p) + "·" + name(spec.input) + ")";
        case Family::cosine: return "cos(" + fmt(p) + "·" + name(spec.input) + ")";
        case Family::exponential: return "exp(" + fmt(p) + "·" + name(spec.input) + ")";
        case Family::poly_sin:
            return name(spec.input) + "·sin(" + fmt(p) + "·" + name(spec.pair) + ")";
        case Family::poly_cos:
            return name(spec.input) + "·cos(" + fmt(p) + "·" + name(spec.pair) + ")";
        case Family::poly_exp:
            return name(spec.input) + "·exp(" + fmt(p) + "·" + name(spec.pair) + ")";
        case Family::poly_pow:
            return name(spec.input) + "·" + name(spec.pair) + "^" + fmt(p);
        case Family::time_power: return name(spec.input) + "·t^" + fmt(p);
        case Family::rational_exp:
            return "exp(" + name(spec.input) + "/(1+" + fmt(p) + "·" + name(spec.input) +
                   "))";
        case Family::spatial_deriv: return name(spec.input);
    }
    return "?";
}

CanonicalTerm canonical_term(const CandidateSpec& spec, double param) {
    CanonicalTerm t{spec.family, spec.input, spec.pair, false, false};
    if (param == 0.0) {
        switch (spec.family) {
            case Family::sine:
            case Family::poly_sin:
                t.dead = true;
                t.degenerate = true;
                break;
            case Family::cosine:
            case Family::exponential:
                t = {Family::constant, -1, -1, false, true};
                break;
            case Family::poly_cos:
            case Family::poly_exp:
            case Family::time_power:
                t = {Family::poly, spec.input, -1, false, true};
                break;
            default: break;
        }
    }
    return t;
}

std::string describe(const LibraryInstance& lib, int eq) {
    std::string out;
    char buf[160];
    for (int j = 0; j < lib.columns(); ++j) {
        const CandidateSpec& s = lib.specs[static_cast<std::size_t>(j)];
        std::snprintf(buf, sizeof buf, "col %3d  %-13s inputs=(%d,%d)  slot=%d  param=%.12g\n", j,
                      family_name(s.family), s.input, s.pair, s.slot, lib.param_of(eq, s));
        out += buf;
    }
    return out;
}

}  // namespace sindy
