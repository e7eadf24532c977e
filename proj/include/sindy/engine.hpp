#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sindy/library.hpp"
#include "sindy/matrix.hpp"
#include "sindy/optim.hpp"
#include "sindy/trajectory.hpp"

namespace sindy {

enum class ObjectiveMode { joint_min, min_max };
enum class SparsityMode { gamma_trainable, lambda_trainable };

struct FitConfig {
    long epochs = 1000;
    double learning_rate = 0.1;  // shared initial rate; per-block overrides below
    double lr_coeffs = -1.0;
    double lr_nl_params = -1.0;
    double lr_gamma = -1.0;
    double lr_sparsity = -1.0;
    double decay_factor = 0.5;
    long decay_every = 1000;
    double threshold = 5e-3;
    // Epoch at which sequential thresholding starts; -1 picks the first
    // epoch whose decayed learning rate is at or below the threshold, which
    // is where zeroed entries would stop escaping the tolerance band anyway.
    // Masks are permanent from the first application either way.
    long threshold_start = -1;
    long batch_size = 0;  // 0 = full batch
    ObjectiveMode objective = ObjectiveMode::joint_min;
    SparsityMode sparsity = SparsityMode::gamma_trainable;
    double gamma_init_std = 1.0;
    double sparsity_init = 1.0;  // starting value of the scalar knob (lambda mode)
    std::uint64_t seed = 1;
    bool record_gamma_history = true;

    void validate() const;
    double rate_of(double override_rate) const {
        return override_rate > 0.0 ? override_rate : learning_rate;
    }
};

/// Everything the optimization loop mutates. Masks pin thresholded entries
/// at exactly zero for the rest of the run; gamma entries whose coefficient
/// was thresholded are frozen so they saturate bit-identically.
struct FitState {
    LibraryInstance lib;  // nl_params updated in place
    Matrix coeffs;        // p x m
    Matrix gamma;         // m x p (per-equation diagonal weights)
    double sparsity_knob = 1.0;
    std::vector<std::uint8_t> coeff_mask;    // matches coeffs.flat()
    std::vector<std::uint8_t> nl_mask;       // matches lib.nl_params.flat()
    std::vector<std::uint8_t> gamma_frozen;  // matches gamma.flat()
    AdamState adam_coeffs, adam_nl, adam_gamma, adam_sparsity;
    long epoch = 0;
};

struct FitReport {
    Matrix coeffs;     // p x m
    Matrix nl_params;  // m x n_slots
    Matrix gamma;      // m x p
    double sparsity_knob = 1.0;
    std::vector<double> loss_history;  // one entry per epoch, full-data loss
    Matrix gamma_history;              // epochs x (m*p) absolute values; x1 for divergence fits
    std::vector<std::string> equations;
    std::vector<std::string> duplicate_warnings;
    std::vector<std::uint8_t> coeff_mask, nl_mask;
    long epochs_run = 0;
    double seconds_total = 0.0;
    bool empty_model = false;
    long sparsity_clamp_events = 0;

    double final_loss() const { return loss_history.empty() ? 0.0 : loss_history.back(); }
};

/// Raised when the loss leaves the finite range mid-run.
class FitDivergedError : public std::runtime_error {
public:
    FitDivergedError(long epoch, const std::string& what)
        : std::runtime_error(what), epoch_(epoch) {}
    long epoch() const { return epoch_; }

private:
    long epoch_;
};

/// Regression data in the generic form the engine consumes: input columns
/// the dictionary reads, per-row time stamps, and one target column per
/// equation. For an ODE trajectory inputs == states and targets == dX.
struct RegressionProblem {
    Matrix inputs;   // n x n_inputs
    std::vector<double> t;
    Matrix targets;  // n x n_equations
    std::vector<std::string> target_names;
};

RegressionProblem problem_from(const Trajectory& traj);

// --- objective pieces (single equation), used directly by the loop and by
//     the finite-difference oracles in the tests ---

/// ||dxdt - theta * coeffs||_2^2 + sparsity * sum_c |gamma_c| |coeffs_c|.
double loss_eq(std::span<const double> dxdt, const Matrix& theta, std::span<const double> coeffs,
               double sparsity, std::span<const double> gamma);

/// Sum of loss_eq over equations; theta is shared across equations here.
double loss(const Matrix& dxdt, const Matrix& theta, const Matrix& coeffs, double sparsity,
            const Matrix& gamma);

/// -2 theta^T (dxdt - theta coeffs) + sparsity |gamma| sign(coeffs); sign(0) = 0.
std::vector<double> grad_coeffs_eq(std::span<const double> dxdt, const Matrix& theta,
                                   std::span<const double> coeffs, double sparsity,
                                   std::span<const double> gamma);

/// Per-slot chain rule: -2 sum_rows resid * d(column)/d(slot) * coeff(column).
std::vector<double> grad_nl_eq(const LibraryInstance& lib, int eq, const Matrix& dslot,
                               std::span<const double> resid, std::span<const double> coeffs);

/// sparsity * |coeffs| .* sign(gamma), elementwise; sign(0) = 0.
std::vector<double> grad_gamma_eq(std::span<const double> coeffs, double sparsity,
                                  std::span<const double> gamma);

/// d(loss)/d(sparsity knob) = sum over equations of sum_c |gamma_c||coeffs_c|.
double grad_sparsity_scalar(const Matrix& coeffs, const Matrix& gamma);

/// Mean over samples of |sum_eq d(predicted eq)/d(state eq)|: the scalar l1
/// weight of the physics-penalty variant. Zero exactly when the predicted
/// field is divergence-free.
double divergence_weight(const LibraryInstance& lib, const Matrix& coeffs, const Matrix& X,
                         std::span<const double> t);

/// Sequential thresholding: coefficients with |value| <= eps are zeroed and
/// masked permanently; live nonlinear parameters likewise. Gamma entries of
/// newly masked coefficients freeze.
void threshold(FitState& state, double eps);

/// The full optimization loop. Initializes coefficients and nonlinear
/// parameters at 1, gamma from a seeded Gaussian (gamma mode) or the knob
/// from sparsity_init (lambda mode), then runs `epochs` of gradient
/// updates with sequential thresholding after every batch.
FitReport fit(const RegressionProblem& problem, const LibraryInstance& lib,
              const FitConfig& config);
FitReport fit(const Trajectory& traj, const LibraryInstance& lib, const FitConfig& config);

/// Physics-penalty variant: the l1 weight is the scalar mean absolute
/// divergence of the predicted field (recomputed every epoch), the knob is
/// fixed at 1 and gamma is not trained. Requires a dictionary without
/// spatial_deriv columns.
FitReport fit_divergence(const RegressionProblem& problem, const LibraryInstance& lib,
                         const FitConfig& config);
FitReport fit_divergence(const Trajectory& traj, const LibraryInstance& lib,
                         const FitConfig& config);

/// One line per equation, `d<name>/dt = c1*term1 + ...` with six decimal
/// digits, terms in library column order, zero coefficients omitted.
std::vector<std::string> format_equations(const FitReport& report, const LibraryInstance& lib,
                                          const std::vector<std::string>& names);

}  // namespace sindy
