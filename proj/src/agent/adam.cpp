#include "explab/agent/adam.hpp"

#include <cmath>
#include <vector>

namespace explab::agent {

Adam::Adam(AdamConfig config) : config_(config), m_(PolicyParams::zeros()), v_(PolicyParams::zeros()) {}

void Adam::restore(PolicyParams m, PolicyParams v, std::int64_t actor_steps, std::int64_t critic_steps) {
    m_ = std::move(m);
    v_ = std::move(v);
    actor_steps_ = actor_steps;
    critic_steps_ = critic_steps;
}

void Adam::step(PolicyParams& params, const Gradients& grads) {
    if (grads.actor) ++actor_steps_;
    if (grads.critic) ++critic_steps_;

    std::vector<std::span<double>> p_blocks;
    std::vector<std::span<double>> m_blocks;
    std::vector<std::span<double>> v_blocks;
    std::vector<std::span<const double>> g_blocks;
    std::vector<bool> is_actor;
    params.visit([&](std::span<double> s, bool a) {
        p_blocks.push_back(s);
        is_actor.push_back(a);
    });
    m_.visit([&](std::span<double> s, bool) { m_blocks.push_back(s); });
    v_.visit([&](std::span<double> s, bool) { v_blocks.push_back(s); });
    grads.d.visit([&](std::span<const double> s, bool) { g_blocks.push_back(s); });

    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    for (std::size_t k = 0; k < p_blocks.size(); ++k) {
        const bool active = is_actor[k] ? grads.actor : grads.critic;
        if (!active) continue;
        const auto t = static_cast<double>(is_actor[k] ? actor_steps_ : critic_steps_);
        const double bc1 = 1.0 - std::pow(b1, t);
        const double bc2 = 1.0 - std::pow(b2, t);
        const double step_size = config_.lr / bc1;
        const double sqrt_bc2 = std::sqrt(bc2);
        auto p = p_blocks[k];
        auto m = m_blocks[k];
        auto v = v_blocks[k];
        auto g = g_blocks[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            p[i] -= step_size * m[i] / (std::sqrt(v[i]) / sqrt_bc2 + config_.eps);
        }
    }
}

bool operator==(const Adam& a, const Adam& b) {
    return a.config_.lr == b.config_.lr && a.config_.beta1 == b.config_.beta1 &&
           a.config_.beta2 == b.config_.beta2 && a.config_.eps == b.config_.eps && a.m_ == b.m_ &&
           a.v_ == b.v_ && a.actor_steps_ == b.actor_steps_ && a.critic_steps_ == b.critic_steps_;
}

}  // namespace explab::agent
