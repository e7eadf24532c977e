#include "sindy/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace sindy {

AdamState::AdamState(std::size_t size, AdamVariant variant, double beta1, double beta2,
                     double epsilon)
    : m_(size, 0.0),
      v_(size, 0.0),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      variant_(variant) {
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw std::invalid_argument("adam: betas must lie in [0, 1)");
    if (variant == AdamVariant::optimistic) prev_step_.assign(size, 0.0);
}

bool AdamState::step(std::span<double> params, std::span<const double> grads, double rate,
                     Direction direction, std::span<const std::uint8_t> frozen) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("adam: shape mismatch");
    if (rate <= 0.0) throw std::invalid_argument("adam: rate must be positive");
    for (double g : grads)
        if (!std::isfinite(g)) return false;

    ++step_count_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    const double sign = direction == Direction::descent ? -1.0 : 1.0;

    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!frozen.empty() && frozen[i]) continue;
        const double g = grads[i];
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        double adapted = m_hat / (std::sqrt(v_hat) + epsilon_);
        if (variant_ == AdamVariant::optimistic) {
            const double current = adapted;
            adapted = 2.0 * current - prev_step_[i];
            prev_step_[i] = current;
        }
        params[i] += sign * rate * adapted;
    }
    return true;
}

double rate_at(const StepSchedule& schedule, long epoch) {
    if (epoch < 0) throw std::invalid_argument("rate_at: epoch must be >= 0");
    if (schedule.initial_rate <= 0.0 || schedule.decay_every < 1 || schedule.decay_factor <= 0.0 ||
        schedule.decay_factor > 1.0)
        throw std::invalid_argument("rate_at: invalid schedule");
    const long k = epoch / schedule.decay_every;
    return schedule.initial_rate * std::pow(schedule.decay_factor, static_cast<double>(k));
}

}  // namespace sindy
