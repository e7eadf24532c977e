#include "sindy/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "sindy/kernels.hpp"
#include "sindy/rng.hpp"

namespace sindy {

namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void FitConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("fit config: epochs must be >= 1");
    if (threshold <= 0.0) throw std::invalid_argument("fit config: threshold must be > 0");
    if (learning_rate <= 0.0) throw std::invalid_argument("fit config: learning rate must be > 0");
    if (decay_factor <= 0.0 || decay_factor > 1.0)
        throw std::invalid_argument("fit config: decay factor must lie in (0, 1]");
    if (decay_every < 1) throw std::invalid_argument("fit config: decay_every must be >= 1");
    if (batch_size < 0) throw std::invalid_argument("fit config: batch size must be >= 0");
    if (threshold_start < -1)
        throw std::invalid_argument("fit config: threshold_start must be >= -1");
    if (gamma_init_std < 0.0) throw std::invalid_argument("fit config: gamma_init_std must be >= 0");
    if (sparsity_init < 0.0) throw std::invalid_argument("fit config: sparsity_init must be >= 0");
}

RegressionProblem problem_from(const Trajectory& traj) {
    RegressionProblem p;
    p.inputs = traj.states;
    p.t = traj.times;
    p.targets = traj.derivatives;
    p.target_names = traj.state_names;
    return p;
}

double loss_eq(std::span<const double> dxdt, const Matrix& theta, std::span<const double> coeffs,
               double sparsity, std::span<const double> gamma) {
    const std::size_t n = theta.rows();
    const std::size_t p = theta.cols();
    if (dxdt.size() != n || coeffs.size() != p || gamma.size() != p)
        throw std::invalid_argument("loss: shape mismatch");
    double l2 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double pred = 0.0;
        const double* row = theta.row_ptr(r);
        for (std::size_t c = 0; c < p; ++c) pred += row[c] * coeffs[c];
        const double d = dxdt[r] - pred;
        l2 += d * d;
    }
    double l1 = 0.0;
    for (std::size_t c = 0; c < p; ++c) l1 += std::abs(gamma[c]) * std::abs(coeffs[c]);
    return l2 + sparsity * l1;
}

double loss(const Matrix& dxdt, const Matrix& theta, const Matrix& coeffs, double sparsity,
            const Matrix& gamma) {
    const std::size_t m = dxdt.cols();
    if (coeffs.cols() != m || gamma.rows() != m || gamma.cols() != coeffs.rows())
        throw std::invalid_argument("loss: shape mismatch");
    double total = 0.0;
    for (std::size_t eq = 0; eq < m; ++eq)
        total += loss_eq(dxdt.col(eq), theta, coeffs.col(eq), sparsity, gamma.row(eq));
    return total;
}

std::vector<double> grad_coeffs_eq(std::span<const double> dxdt, const Matrix& theta,
                                   std::span<const double> coeffs, double sparsity,
                                   std::span<const double> gamma) {
    const std::size_t n = theta.rows();
    const std::size_t p = theta.cols();
    if (dxdt.size() != n || coeffs.size() != p || gamma.size() != p)
        throw std::invalid_argument("grad_coeffs: shape mismatch");
    std::vector<double> resid(n);
    for (std::size_t r = 0; r < n; ++r) {
        double pred = 0.0;
        const double* row = theta.row_ptr(r);
        for (std::size_t c = 0; c < p; ++c) pred += row[c] * coeffs[c];
        resid[r] = dxdt[r] - pred;
    }
    std::vector<double> g(p);
    for (std::size_t c = 0; c < p; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += theta(r, c) * resid[r];
        g[c] = -2.0 * acc + sparsity * std::abs(gamma[c]) * sign0(coeffs[c]);
    }
    return g;
}

std::vector<double> grad_nl_eq(const LibraryInstance& lib, int eq, const Matrix& dslot,
                               std::span<const double> resid, std::span<const double> coeffs) {
    (void)eq;
    const std::size_t ns = dslot.cols();
    std::vector<double> g(ns, 0.0);
    for (std::size_t col = 0; col < lib.specs.size(); ++col) {
        const CandidateSpec& spec = lib.specs[col];
        if (!spec.has_slot()) continue;
        const auto s = static_cast<std::size_t>(spec.slot);
        double acc = 0.0;
        for (std::size_t r = 0; r < resid.size(); ++r) acc += resid[r] * dslot(r, s);
        g[s] = -2.0 * acc * coeffs[col];
    }
    return g;
}

std::vector<double> grad_gamma_eq(std::span<const double> coeffs, double sparsity,
                                  std::span<const double> gamma) {
    if (coeffs.size() != gamma.size()) throw std::invalid_argument("grad_gamma: shape mismatch");
    std::vector<double> g(gamma.size());
    for (std::size_t c = 0; c < gamma.size(); ++c)
        g[c] = sparsity * std::abs(coeffs[c]) * sign0(gamma[c]);
    return g;
}

double grad_sparsity_scalar(const Matrix& coeffs, const Matrix& gamma) {
    if (gamma.cols() != coeffs.rows() || gamma.rows() != coeffs.cols())
        throw std::invalid_argument("grad_sparsity: shape mismatch");
    double acc = 0.0;
    for (std::size_t eq = 0; eq < gamma.rows(); ++eq)
        for (std::size_t c = 0; c < gamma.cols(); ++c)
            acc += std::abs(gamma(eq, c)) * std::abs(coeffs(c, eq));
    return acc;
}

double divergence_weight(const LibraryInstance& lib, const Matrix& coeffs, const Matrix& X,
                         std::span<const double> t) {
    const std::size_t n = X.rows();
    const std::size_t m = coeffs.cols();
    std::vector<double> div(n, 0.0);
    for (std::size_t eq = 0; eq < m; ++eq) {
        const Matrix dcols = d_theta_d_x(lib, static_cast<int>(eq), X, t, static_cast<int>(eq));
        for (std::size_t c = 0; c < coeffs.rows(); ++c) {
            const double xi = coeffs(c, eq);
            if (xi == 0.0) continue;
            for (std::size_t r = 0; r < n; ++r) div[r] += xi * dcols(r, c);
        }
    }
    double acc = 0.0;
    for (double v : div) acc += std::abs(v);
    return acc / static_cast<double>(n);
}

void threshold(FitState& state, double eps) {
    const std::size_t p = state.coeffs.rows();
    const std::size_t m = state.coeffs.cols();
    for (std::size_t c = 0; c < p; ++c)
        for (std::size_t eq = 0; eq < m; ++eq) {
            const std::size_t idx = c * m + eq;
            if (state.coeff_mask[idx]) continue;
            if (std::abs(state.coeffs(c, eq)) <= eps) {
                state.coeffs(c, eq) = 0.0;
                state.coeff_mask[idx] = 1;
                state.gamma_frozen[eq * p + c] = 1;
            }
        }
    for (std::size_t i = 0; i < state.lib.nl_params.size(); ++i) {
        if (state.nl_mask[i]) continue;
        if (std::abs(state.lib.nl_params.flat()[i]) <= eps) {
            state.lib.nl_params.flat()[i] = 0.0;
            state.nl_mask[i] = 1;
        }
    }
}

namespace {

struct EqWorkspace {
    Matrix theta_T;  // p x n
    Matrix dslot_T;  // ns x n
    std::vector<double> yhat, resid;
    std::vector<std::uint8_t> col_cached;  // full-batch value caching
};

struct LoopData {
    Matrix inputs_T;   // n_inputs x n
    Matrix targets_T;  // m x n
    std::vector<int> col_of_slot;
};

// Column jobs for one equation at the current masks. In full-batch mode
// value rows survive across epochs, so static columns are filled once.
std::vector<kernels::ColumnJob> make_jobs(const FitState& st, int eq, EqWorkspace& ws,
                                          bool use_cache) {
    const auto p = static_cast<std::size_t>(st.lib.columns());
    const std::size_t m = st.coeffs.cols();
    const std::size_t ns = st.lib.nl_params.cols();
    std::vector<kernels::ColumnJob> jobs;
    jobs.reserve(p);
    for (std::size_t c = 0; c < p; ++c) {
        if (st.coeff_mask[c * m + static_cast<std::size_t>(eq)]) continue;
        const CandidateSpec& spec = st.lib.specs[c];
        const bool slot_live =
            spec.has_slot() &&
            !st.nl_mask[static_cast<std::size_t>(eq) * ns + static_cast<std::size_t>(spec.slot)];
        const bool value_needed = !use_cache || !ws.col_cached[c];
        if (!value_needed && !slot_live) continue;
        jobs.push_back({.col = static_cast<int>(c),
                        .want_value = value_needed,
                        .slot = slot_live ? spec.slot : -1});
    }
    return jobs;
}

std::vector<int> active_columns(const FitState& st, int eq) {
    const std::size_t m = st.coeffs.cols();
    std::vector<int> cols;
    for (std::size_t c = 0; c < st.coeffs.rows(); ++c)
        if (!st.coeff_mask[c * m + static_cast<std::size_t>(eq)])
            cols.push_back(static_cast<int>(c));
    return cols;
}

struct StepOutcome {
    double loss = 0.0;
    double div_weight = 0.0;
};

}  // namespace

namespace {

class FitLoop {
public:
    FitLoop(const RegressionProblem& prob, const LibraryInstance& lib, const FitConfig& cfg,
            bool divergence_variant)
        : prob_(prob), cfg_(cfg), divergence_(divergence_variant) {
        cfg.validate();
        if (static_cast<int>(prob.inputs.cols()) != lib.n_inputs)
            throw std::invalid_argument("fit: dictionary expects " + std::to_string(lib.n_inputs) +
                                        " input columns, data has " +
                                        std::to_string(prob.inputs.cols()));
        if (static_cast<int>(prob.targets.cols()) != lib.n_equations)
            throw std::invalid_argument("fit: dictionary is built for " +
                                        std::to_string(lib.n_equations) + " equations");
        if (prob.inputs.rows() != prob.targets.rows() || prob.inputs.rows() != prob.t.size())
            throw std::invalid_argument("fit: inconsistent sample counts");
        if (divergence_)
            for (const auto& s : lib.specs)
                if (s.family == Family::spatial_deriv)
                    throw std::invalid_argument(
                        "fit_divergence: spatial_deriv columns are unsupported");

        n_ = prob.inputs.rows();
        m_ = static_cast<std::size_t>(lib.n_equations);
        p_ = static_cast<std::size_t>(lib.columns());
        ns_ = static_cast<std::size_t>(lib.n_slots);

        data_.inputs_T = prob.inputs.transposed();
        data_.targets_T = prob.targets.transposed();
        data_.col_of_slot.assign(ns_, -1);
        for (std::size_t c = 0; c < p_; ++c)
            if (lib.specs[c].has_slot()) data_.col_of_slot[static_cast<std::size_t>(
                lib.specs[c].slot)] = static_cast<int>(c);

        st_.lib = lib;
        st_.lib.nl_params.fill(1.0);
        if (const char* probe = std::getenv("SINDY_TP_INIT")) {  // TEMP diagnostic hook
            for (const CandidateSpec& spec : st_.lib.specs)
                if (spec.family == Family::time_power)
                    for (int eq = 0; eq < st_.lib.n_equations; ++eq)
                        st_.lib.nl_params(static_cast<std::size_t>(eq),
                                          static_cast<std::size_t>(spec.slot)) = std::atof(probe);
        }
        st_.coeffs.resize(p_, m_, 1.0);
        st_.gamma.resize(m_, p_, 1.0);
        st_.coeff_mask.assign(p_ * m_, 0);
        st_.nl_mask.assign(m_ * ns_, 0);
        st_.gamma_frozen.assign(m_ * p_, 0);
        if (!divergence_ && cfg.sparsity == SparsityMode::gamma_trainable) {
            Rng rng(sub_seed(cfg.seed, "gamma-init"));
            for (double& g : st_.gamma.flat()) g = rng.gaussian(0.0, cfg.gamma_init_std);
            st_.sparsity_knob = 1.0;
        } else if (!divergence_) {
            st_.sparsity_knob = cfg.sparsity_init;
        } else {
            st_.sparsity_knob = 1.0;  // fixed; the divergence weight carries the penalty
        }

        const bool optimistic = cfg.objective == ObjectiveMode::min_max;
        st_.adam_coeffs = AdamState(p_ * m_);
        st_.adam_nl = AdamState(m_ * ns_);
        st_.adam_gamma = AdamState(m_ * p_, optimistic ? AdamVariant::optimistic
                                                       : AdamVariant::standard);
        st_.adam_sparsity = AdamState(1, optimistic ? AdamVariant::optimistic
                                                    : AdamVariant::standard);

        ws_.resize(m_);
        grad_coeffs_.assign(p_ * m_, 0.0);
        grad_nl_.assign(m_ * ns_, 0.0);
        grad_gamma_.assign(m_ * p_, 0.0);
    }

    FitReport run() {
        const auto t0 = std::chrono::steady_clock::now();
        FitReport rep;
        rep.loss_history.reserve(static_cast<std::size_t>(cfg_.epochs));
        const std::size_t gamma_cols = divergence_ ? 1 : m_ * p_;
        if (cfg_.record_gamma_history)
            rep.gamma_history.resize(static_cast<std::size_t>(cfg_.epochs), gamma_cols);

        const bool full_batch = cfg_.batch_size == 0 || cfg_.batch_size >= static_cast<long>(n_);
        threshold_from_ = cfg_.threshold_start;
        if (threshold_from_ < 0) {
            // auto: first epoch whose decayed rate sits at or below the
            // tolerance band, where zeroed entries could no longer escape
            const StepSchedule sched{cfg_.rate_of(cfg_.lr_coeffs), cfg_.decay_factor,
                                     cfg_.decay_every};
            threshold_from_ = cfg_.epochs;  // may never trigger on short runs
            for (long e = 0; e < cfg_.epochs; e += cfg_.decay_every)
                if (rate_at(sched, e) <= cfg_.threshold) {
                    threshold_from_ = e;
                    break;
                }
        }
        Rng batch_rng(sub_seed(cfg_.seed, "batching"));
        std::vector<std::size_t> order(n_);
        for (std::size_t i = 0; i < n_; ++i) order[i] = i;

        for (long epoch = 0; epoch < cfg_.epochs; ++epoch) {
            st_.epoch = epoch;
            double epoch_loss = 0.0;
            double epoch_div = 0.0;
            if (full_batch) {
                const StepOutcome out = step_batch(data_.inputs_T, data_.targets_T, prob_.t,
                                                   epoch, true);
                epoch_loss = out.loss;
                epoch_div = out.div_weight;
            } else {
                batch_rng.shuffle(order);
                for (std::size_t lo = 0; lo < n_; lo += static_cast<std::size_t>(cfg_.batch_size)) {
                    const std::size_t hi =
                        std::min(n_, lo + static_cast<std::size_t>(cfg_.batch_size));
                    gather_batch(order, lo, hi);
                    step_batch(batch_inputs_T_, batch_targets_T_, batch_t_, epoch, false);
                }
                const StepOutcome out = evaluate_full();
                epoch_loss = out.loss;
                epoch_div = out.div_weight;
            }
            if (!std::isfinite(epoch_loss))
                throw FitDivergedError(epoch, "fit: loss diverged at epoch " +
                                                  std::to_string(epoch));
            rep.loss_history.push_back(epoch_loss);
            if (cfg_.record_gamma_history) {
                double* row = rep.gamma_history.row_ptr(static_cast<std::size_t>(epoch));
                if (divergence_)
                    row[0] = epoch_div;
                else
                    for (std::size_t i = 0; i < m_ * p_; ++i)
                        row[i] = std::abs(st_.gamma.flat()[i]);
            }
        }

        // identically-zero columns (a masked frequency inside sin) carry no
        // signal, so a leftover coefficient on one is a ghost; drop it
        for (std::size_t eq = 0; eq < m_; ++eq)
            for (std::size_t c = 0; c < p_; ++c) {
                const CandidateSpec& spec = st_.lib.specs[c];
                if (canonical_term(spec, st_.lib.param_of(static_cast<int>(eq), spec)).dead &&
                    st_.coeffs(c, eq) != 0.0) {
                    st_.coeffs(c, eq) = 0.0;
                    st_.coeff_mask[c * m_ + eq] = 1;
                }
            }
        rep.coeffs = st_.coeffs;
        rep.nl_params = st_.lib.nl_params;
        rep.gamma = st_.gamma;
        rep.sparsity_knob = st_.sparsity_knob;
        rep.coeff_mask = st_.coeff_mask;
        rep.nl_mask = st_.nl_mask;
        rep.epochs_run = cfg_.epochs;
        rep.sparsity_clamp_events = clamp_events_;
        rep.empty_model = true;
        for (std::uint8_t msk : st_.coeff_mask)
            if (!msk) rep.empty_model = false;
        collect_duplicates(rep);
        rep.equations = format_equations(rep, st_.lib, prob_.target_names);
        rep.seconds_total =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

    const LibraryInstance& final_library() const { return st_.lib; }

private:
    void gather_batch(const std::vector<std::size_t>& order, std::size_t lo, std::size_t hi) {
        const std::size_t bs = hi - lo;
        batch_inputs_T_.resize(data_.inputs_T.rows(), bs);
        batch_targets_T_.resize(m_, bs);
        batch_t_.resize(bs);
        for (std::size_t i = 0; i < bs; ++i) {
            const std::size_t src = order[lo + i];
            for (std::size_t k = 0; k < data_.inputs_T.rows(); ++k)
                batch_inputs_T_(k, i) = data_.inputs_T(k, src);
            for (std::size_t eq = 0; eq < m_; ++eq)
                batch_targets_T_(eq, i) = data_.targets_T(eq, src);
            batch_t_[i] = prob_.t[src];
        }
    }

    // One gradient step on the given (possibly full) batch, followed by
    // sequential thresholding. Returns the pre-update batch loss.
    StepOutcome step_batch(const Matrix& inputs_T, const Matrix& targets_T,
                           std::span<const double> t, long epoch, bool use_cache) {
        const std::size_t nb = inputs_T.cols();
        // the knob lives in mean-loss units; the summed l2 term grows with
        // the batch, so the l1 weight scales with the element count
        double l1_scale = static_cast<double>(nb) * static_cast<double>(m_);
        if (const char* probe = std::getenv("SINDY_L1MUL")) l1_scale *= std::atof(probe);
        StepOutcome out;
        std::fill(grad_coeffs_.begin(), grad_coeffs_.end(), 0.0);
        std::fill(grad_nl_.begin(), grad_nl_.end(), 0.0);
        std::fill(grad_gamma_.begin(), grad_gamma_.end(), 0.0);

        double div_weight = 0.0;
        if (divergence_) {
            // Engine inputs are row-major per sample; reuse the problem view.
            div_weight = divergence_weight(st_.lib, st_.coeffs,
                                           use_cache ? prob_.inputs : batch_inputs_row_(), t);
            out.div_weight = div_weight;
        }

        double l2 = 0.0, l1 = 0.0;
        for (std::size_t eq = 0; eq < m_; ++eq) {
            EqWorkspace& ws = ws_[eq];
            if (ws.theta_T.rows() != p_ || ws.theta_T.cols() != nb) {
                ws.theta_T.resize(p_, nb);
                ws.dslot_T.resize(ns_, nb);
                ws.yhat.resize(nb);
                ws.resid.resize(nb);
                ws.col_cached.assign(p_, 0);
            }
            if (!use_cache) ws.col_cached.assign(p_, 0);

            const auto jobs = make_jobs(st_, static_cast<int>(eq), ws, use_cache);
            kernels::fill_columns(st_.lib, static_cast<int>(eq), inputs_T, t, jobs, ws.theta_T,
                                  ws.dslot_T);
            for (const auto& job : jobs)
                if (job.want_value) ws.col_cached[static_cast<std::size_t>(job.col)] = 1;

            const std::vector<int> active = active_columns(st_, static_cast<int>(eq));
            std::vector<double> coeff_eq(p_);
            for (std::size_t c = 0; c < p_; ++c) coeff_eq[c] = st_.coeffs(c, eq);

            kernels::predict(ws.theta_T, coeff_eq, active, ws.yhat);
            const double* target = targets_T.row_ptr(eq);
            for (std::size_t r = 0; r < nb; ++r) ws.resid[r] = target[r] - ws.yhat[r];
            l2 += kernels::sum_sq(ws.resid);

            const double sp = l1_scale * (divergence_ ? div_weight : st_.sparsity_knob);
            for (int c : active) {
                const double w = divergence_
                                     ? 1.0
                                     : std::abs(st_.gamma(eq, static_cast<std::size_t>(c)));
                l1 += w * std::abs(coeff_eq[static_cast<std::size_t>(c)]) * sp;
            }

            // coefficient gradient
            std::vector<double> dots(active.size());
            kernels::row_dots(ws.theta_T, ws.resid, active, dots);
            for (std::size_t i = 0; i < active.size(); ++i) {
                const auto c = static_cast<std::size_t>(active[i]);
                const double w = l1_scale * (divergence_
                                                 ? div_weight
                                                 : st_.sparsity_knob * std::abs(st_.gamma(eq, c)));
                grad_coeffs_[c * m_ + eq] = -2.0 * dots[i] + w * sign0(coeff_eq[c]);
            }

            // nonlinear-parameter gradient for live slots with live coefficients
            std::vector<int> live_slots;
            for (const auto& job : jobs)
                if (job.slot >= 0) live_slots.push_back(job.slot);
            if (!live_slots.empty()) {
                std::vector<double> sdots(live_slots.size());
                kernels::row_dots(ws.dslot_T, ws.resid, live_slots, sdots);
                for (std::size_t i = 0; i < live_slots.size(); ++i) {
                    const auto s = static_cast<std::size_t>(live_slots[i]);
                    const auto c = static_cast<std::size_t>(data_.col_of_slot[s]);
                    grad_nl_[eq * ns_ + s] = -2.0 * sdots[i] * coeff_eq[c];
                }
            }

            if (!divergence_ && cfg_.sparsity == SparsityMode::gamma_trainable)
                for (std::size_t c = 0; c < p_; ++c)
                    grad_gamma_[eq * p_ + c] = l1_scale * st_.sparsity_knob *
                                               std::abs(coeff_eq[c]) * sign0(st_.gamma(eq, c));
        }
        out.loss = l2 + l1;

        // updates (all gradients taken at the pre-update point)
        const double rate_xi = rate_at({cfg_.rate_of(cfg_.lr_coeffs), cfg_.decay_factor,
                                        cfg_.decay_every},
                                       epoch);
        const double rate_nl = rate_at({cfg_.rate_of(cfg_.lr_nl_params), cfg_.decay_factor,
                                        cfg_.decay_every},
                                       epoch);
        st_.adam_coeffs.step(st_.coeffs.flat(), grad_coeffs_, rate_xi, Direction::descent,
                             st_.coeff_mask);
        if (ns_ > 0)
            st_.adam_nl.step(st_.lib.nl_params.flat(), grad_nl_, rate_nl, Direction::descent,
                             st_.nl_mask);

        if (!divergence_) {
            const Direction dir = cfg_.objective == ObjectiveMode::min_max ? Direction::ascent
                                                                           : Direction::descent;
            if (cfg_.sparsity == SparsityMode::gamma_trainable) {
                const double rate_g = rate_at({cfg_.rate_of(cfg_.lr_gamma), cfg_.decay_factor,
                                               cfg_.decay_every},
                                              epoch);
                st_.adam_gamma.step(st_.gamma.flat(), grad_gamma_, rate_g, dir, st_.gamma_frozen);
            } else {
                const double rate_s = rate_at({cfg_.rate_of(cfg_.lr_sparsity), cfg_.decay_factor,
                                               cfg_.decay_every},
                                              epoch);
                double gs = l1_scale * grad_sparsity_scalar(st_.coeffs, st_.gamma);
                st_.adam_sparsity.step({&st_.sparsity_knob, 1}, {&gs, 1}, rate_s, dir);
                if (st_.sparsity_knob < 0.0) {
                    st_.sparsity_knob = 0.0;
                    ++clamp_events_;
                }
            }
        }

        // columns owned by live slots change under the parameter update
        for (std::size_t eq = 0; eq < m_; ++eq)
            for (std::size_t s = 0; s < ns_; ++s)
                if (!st_.nl_mask[eq * ns_ + s] && data_.col_of_slot[s] >= 0)
                    ws_[eq].col_cached[static_cast<std::size_t>(data_.col_of_slot[s])] = 0;

        if (epoch >= threshold_from_) {
            threshold(st_, cfg_.threshold);
        } else {
            // pre-mask phase: zero small entries without masking, so they
            // may re-enter while the learning rate still exceeds the band
            for (std::size_t i = 0; i < st_.coeffs.size(); ++i)
                if (!st_.coeff_mask[i] && std::abs(st_.coeffs.flat()[i]) <= cfg_.threshold)
                    st_.coeffs.flat()[i] = 0.0;
            for (std::size_t i = 0; i < st_.lib.nl_params.size(); ++i)
                if (!st_.nl_mask[i] && std::abs(st_.lib.nl_params.flat()[i]) <= cfg_.threshold)
                    st_.lib.nl_params.flat()[i] = 0.0;
        }
        return out;
    }

    // Full-data loss at the current parameters (batch mode history).
    StepOutcome evaluate_full() {
        StepOutcome out;
        double div_weight = 0.0;
        if (divergence_) {
            div_weight = divergence_weight(st_.lib, st_.coeffs, prob_.inputs, prob_.t);
            out.div_weight = div_weight;
        }
        double total = 0.0;
        const double l1_scale = static_cast<double>(n_) * static_cast<double>(m_);
        Matrix theta_T(p_, n_), dslot_T(ns_, n_);
        std::vector<double> yhat(n_);
        for (std::size_t eq = 0; eq < m_; ++eq) {
            std::vector<kernels::ColumnJob> jobs;
            const std::vector<int> active = active_columns(st_, static_cast<int>(eq));
            for (int c : active) jobs.push_back({.col = c, .want_value = true, .slot = -1});
            kernels::fill_columns(st_.lib, static_cast<int>(eq), data_.inputs_T, prob_.t, jobs,
                                  theta_T, dslot_T);
            std::vector<double> coeff_eq(p_);
            for (std::size_t c = 0; c < p_; ++c) coeff_eq[c] = st_.coeffs(c, eq);
            kernels::predict(theta_T, coeff_eq, active, yhat);
            const double* target = data_.targets_T.row_ptr(eq);
            double l2 = 0.0;
            for (std::size_t r = 0; r < n_; ++r) {
                const double d = target[r] - yhat[r];
                l2 += d * d;
            }
            double l1 = 0.0;
            for (int c : active) {
                const auto cc = static_cast<std::size_t>(c);
                const double w = divergence_ ? div_weight
                                             : st_.sparsity_knob * std::abs(st_.gamma(eq, cc));
                l1 += w * std::abs(coeff_eq[cc]);
            }
            total += l2 + l1_scale * l1;
        }
        out.loss = total;
        return out;
    }

    // Row-major view of the current batch inputs (divergence variant only).
    Matrix batch_inputs_row_() const { return batch_inputs_T_.transposed(); }

    void collect_duplicates(FitReport& rep) {
        char buf[160];
        for (std::size_t eq = 0; eq < m_; ++eq) {
            const std::vector<int> active = active_columns(st_, static_cast<int>(eq));
            if (active.size() < 2) continue;
            std::vector<kernels::ColumnJob> jobs;
            for (int c : active) jobs.push_back({.col = c, .want_value = true, .slot = -1});
            Matrix theta_T(p_, n_), dslot_T(ns_, n_);
            kernels::fill_columns(st_.lib, static_cast<int>(eq), data_.inputs_T, prob_.t, jobs,
                                  theta_T, dslot_T);
            for (std::size_t a = 0; a < active.size(); ++a)
                for (std::size_t b = a + 1; b < active.size(); ++b) {
                    const auto ca = static_cast<std::size_t>(active[a]);
                    const auto cb = static_cast<std::size_t>(active[b]);
                    const double nab = kernels::dot(theta_T.row(ca), theta_T.row(cb));
                    const double na = kernels::sum_sq(theta_T.row(ca));
                    const double nb2 = kernels::sum_sq(theta_T.row(cb));
                    if (na == 0.0 || nb2 == 0.0) continue;
                    const double cosine = std::abs(nab) / std::sqrt(na * nb2);
                    if (cosine > 1.0 - 1e-8) {
                        std::snprintf(buf, sizeof buf,
                                      "equation %zu: columns %d and %d are near-identical "
                                      "(cosine similarity %.12f)",
                                      eq, active[a], active[b], cosine);
                        rep.duplicate_warnings.emplace_back(buf);
                    }
                }
        }
    }

    const RegressionProblem& prob_;
    FitConfig cfg_;
    bool divergence_;
    std::size_t n_ = 0, m_ = 0, p_ = 0, ns_ = 0;
    LoopData data_;
    FitState st_;
    std::vector<EqWorkspace> ws_;
    std::vector<double> grad_coeffs_, grad_nl_, grad_gamma_;
    Matrix batch_inputs_T_, batch_targets_T_;
    std::vector<double> batch_t_;
    long clamp_events_ = 0;
    long threshold_from_ = 0;
};

}  // namespace

FitReport fit(const RegressionProblem& problem, const LibraryInstance& lib,
              const FitConfig& config) {
    FitLoop loop(problem, lib, config, false);
    return loop.run();
}

FitReport fit(const Trajectory& traj, const LibraryInstance& lib, const FitConfig& config) {
    validate(traj);
    return fit(problem_from(traj), lib, config);
}

FitReport fit_divergence(const RegressionProblem& problem, const LibraryInstance& lib,
                         const FitConfig& config) {
    FitLoop loop(problem, lib, config, true);
    return loop.run();
}

FitReport fit_divergence(const Trajectory& traj, const LibraryInstance& lib,
                         const FitConfig& config) {
    validate(traj);
    return fit_divergence(problem_from(traj), lib, config);
}

std::vector<std::string> format_equations(const FitReport& report, const LibraryInstance& lib,
                                          const std::vector<std::string>& names) {
    std::vector<std::string> lines;
    const std::size_t m = report.coeffs.cols();
    char buf[64];
    for (std::size_t eq = 0; eq < m; ++eq) {
        std::string name = eq < names.size() ? names[eq] : "x" + std::to_string(eq + 1);
        std::string line = "d" + name + "/dt = ";
        bool first = true;
        for (std::size_t c = 0; c < report.coeffs.rows(); ++c) {
            const double coeff = report.coeffs(c, eq);
            if (coeff == 0.0) continue;
            if (!first) line += coeff < 0.0 ? " - " : " + ";
            std::snprintf(buf, sizeof buf, "%.6f", first ? coeff : std::abs(coeff));
            first = false;
            line += buf;
            LibraryInstance view = lib;
            view.nl_params = report.nl_params;
            const std::string term =
                term_name(view, static_cast<int>(eq), static_cast<int>(c),
                          lib.input_names.empty() ? names : lib.input_names);
            if (term != "1") line += "·" + term;
        }
        if (first) line += "0";
        lines.push_back(line);
    }
    for (const std::string& w : report.duplicate_warnings) lines.push_back("# warning: " + w);
    return lines;
}

}  // namespace sindy
