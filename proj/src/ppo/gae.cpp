#include "explab/errors.hpp"
#include "explab/ppo/ppo.hpp"

namespace explab::ppo {

GaeResult compute_gae(const RolloutBuffer& b, double gamma, double lambda) {
    const std::size_t n = b.size();
    if (b.values.size() != n || b.rewards.size() != n || b.dones.size() != n)
        throw UsageError("compute_gae: inconsistent rollout buffer");
    GaeResult out;
    out.advantages.assign(n, 0.0);
    out.returns.assign(n, 0.0);
    double running = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        const double next_value = (k + 1 == n) ? b.bootstrap_value : b.values[k + 1];
        const double nonterminal = b.dones[k] ? 0.0 : 1.0;
        const double delta = b.rewards[k] + gamma * next_value * nonterminal - b.values[k];
        running = delta + gamma * lambda * nonterminal * running;
        out.advantages[k] = running;
        out.returns[k] = running + b.values[k];
    }
    return out;
}

EpisodeReturns discounted_returns_episode(const Episode& e, double gamma, double beta) {
    EpisodeReturns r;
    double discount = 1.0;
    for (std::size_t t = 0; t < e.length(); ++t) {
        r.g_ext += discount * e.rewards_ext[t];
        r.g_int += discount * beta * e.rewards_int[t];
        discount *= gamma;
    }
    return r;
}

}  // namespace explab::ppo
