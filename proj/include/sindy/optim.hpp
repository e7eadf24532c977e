#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sindy {

enum class Direction { descent, ascent };
enum class AdamVariant { standard, optimistic };

/// Adaptive-moment optimizer state for one parameter block. The optimistic
/// variant applies twice the current adapted step minus the previous one,
/// which damps the oscillations of adversarial (ascent) updates.
class AdamState {
public:
    AdamState() = default;
    AdamState(std::size_t size, AdamVariant variant = AdamVariant::standard, double beta1 = 0.9,
              double beta2 = 0.999, double epsilon = 1e-8);

    /// Bias-corrected update of `params` in place. `direction` flips the
    /// sign of the applied step. Entries flagged in `frozen` are left
    /// untouched (state included). Returns false without touching anything
    /// if the gradient contains a non-finite entry.
    bool step(std::span<double> params, std::span<const double> grads, double rate,
              Direction direction, std::span<const std::uint8_t> frozen = {});

    long step_count() const { return step_count_; }
    std::size_t size() const { return m_.size(); }

private:
    std::vector<double> m_, v_, prev_step_;
    long step_count_ = 0;
    double beta1_ = 0.9, beta2_ = 0.999, epsilon_ = 1e-8;
    AdamVariant variant_ = AdamVariant::standard;
};

/// Step-decay learning-rate schedule: rate halves (by default) every
/// `decay_every` epochs.
struct StepSchedule {
    double initial_rate = 0.1;
    double decay_factor = 0.5;
    long decay_every = 1000;
};

double rate_at(const StepSchedule& schedule, long epoch);

}  // namespace sindy
