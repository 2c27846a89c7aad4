#pragma once

#include <cstdint>

#include "explab/agent/policy.hpp"

namespace explab::agent {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction. Actor and critic halves keep separate step counters and are
/// only touched when the gradient carries a signal for them, so an imitation loss on the
/// actor leaves the critic's moments alone. One instance is shared by every loss of a run.
class Adam {
public:
    explicit Adam(AdamConfig config = {});

    void step(PolicyParams& params, const Gradients& grads);

    const AdamConfig& config() const noexcept { return config_; }
    void set_lr(double lr) noexcept { config_.lr = lr; }
    std::int64_t actor_steps() const noexcept { return actor_steps_; }
    std::int64_t critic_steps() const noexcept { return critic_steps_; }
    const PolicyParams& first_moment() const noexcept { return m_; }
    const PolicyParams& second_moment() const noexcept { return v_; }

    /// Restores the full optimizer state (checkpoint loading).
    void restore(PolicyParams m, PolicyParams v, std::int64_t actor_steps, std::int64_t critic_steps);

    friend bool operator==(const Adam& a, const Adam& b);

private:
    AdamConfig config_;
    PolicyParams m_;
    PolicyParams v_;
    std::int64_t actor_steps_ = 0;
    std::int64_t critic_steps_ = 0;
};

}  // namespace explab::agent
