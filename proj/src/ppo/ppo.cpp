#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "explab/errors.hpp"
#include "explab/ppo/ppo.hpp"

namespace explab::ppo {

void validate(const PpoConfig& c) {
    if (c.rollout_steps <= 0) throw ConfigError("ppo.rollout_steps must be positive");
    if (c.epochs <= 0 || c.num_minibatches <= 0) throw ConfigError("ppo epochs/minibatches must be positive");
    if (c.rollout_steps % c.num_minibatches != 0)
        throw ConfigError("ppo.rollout_steps must be divisible by ppo.num_minibatches");
    if (!(c.clip > 0.0) || !(c.lr > 0.0)) throw ConfigError("ppo clip and lr must be positive");
    if (c.gamma < 0.0 || c.gamma > 1.0 || c.lambda < 0.0 || c.lambda > 1.0)
        throw ConfigError("ppo gamma/lambda must lie in [0, 1]");
    if (c.entropy_coef < 0.0 || c.value_coef < 0.0 || c.max_grad_norm < 0.0)
        throw ConfigError("ppo coefficients must be non-negative");
}

PpoLoss ppo_loss(const agent::PolicyParams& params, const PpoBatch& batch, const PpoConfig& cfg,
                 agent::Gradients* grads) {
    const auto n = static_cast<Eigen::Index>(batch.actions.size());
    if (n == 0) throw UsageError("ppo_loss: empty batch");
    const auto cache = agent::forward(params, batch.inputs, agent::Heads::Both);
    const double inv_n = 1.0 / static_cast<double>(n);

    PpoLoss loss;
    Matrix dlogits(agent::kNumActions, n);
    agent::RowVector dvalues(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector lp = agent::log_softmax(cache.logits.col(i));
        const Vector p = lp.array().exp();
        const int a = batch.actions[static_cast<std::size_t>(i)];
        const double ratio = std::exp(lp(a) - batch.old_logprobs(i));
        const double adv = batch.advantages(i);
        const double surr1 = ratio * adv;
        const double surr2 = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * adv;
        const bool unclipped = surr1 <= surr2;
        loss.policy += -std::min(surr1, surr2) * inv_n;
        loss.mean_ratio += ratio * inv_n;
        if (std::abs(ratio - 1.0) > cfg.clip) loss.clip_fraction += inv_n;

        const double h = -(p.array() * lp.array()).sum();
        loss.entropy += h * inv_n;

        const double v = cache.values(i);
        const double ret = batch.returns(i);
        double dv = 0.0;
        if (cfg.clip_value_loss) {
            const double v_clipped = batch.old_values(i) + std::clamp(v - batch.old_values(i), -cfg.clip, cfg.clip);
            const double l1 = (v - ret) * (v - ret);
            const double l2 = (v_clipped - ret) * (v_clipped - ret);
            if (l1 >= l2) {
                loss.value += l1 * inv_n;
                dv = 2.0 * (v - ret);
            } else {
                loss.value += l2 * inv_n;
                const bool inside = std::abs(v - batch.old_values(i)) < cfg.clip;
                dv = inside ? 2.0 * (v_clipped - ret) : 0.0;
            }
        } else {
            loss.value += (v - ret) * (v - ret) * inv_n;
            dv = 2.0 * (v - ret);
        }

        if (grads) {
            const double dpolicy_dlogp = unclipped ? -ratio * adv : 0.0;
            for (int j = 0; j < agent::kNumActions; ++j) {
                const double dlogp = (j == a ? 1.0 : 0.0) - p(j);
                const double dentropy = -p(j) * (lp(j) + h);
                dlogits(j, i) = inv_n * (dpolicy_dlogp * dlogp - cfg.entropy_coef * dentropy);
            }
            dvalues(i) = inv_n * cfg.value_coef * dv;
        }
    }
    loss.total = loss.policy + cfg.value_coef * loss.value - cfg.entropy_coef * loss.entropy;
    if (grads) *grads = agent::backward(params, cache, dlogits, dvalues);
    return loss;
}

PpoStats ppo_update(agent::PolicyParams& params, agent::Adam& optimizer, const RolloutBuffer& buffer,
                    const GaeResult& gae, const PpoConfig& cfg, Rng& rng) {
    const std::size_t n = buffer.size();
    if (n == 0 || gae.advantages.size() != n) throw UsageError("ppo_update: GAE not computed for this buffer");

    std::vector<double> adv = gae.advantages;
    if (cfg.normalize_advantages) {
        const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double a : adv) var += (a - mean) * (a - mean);
        const double stddev = std::sqrt(var / static_cast<double>(n));
        for (double& a : adv) a = (a - mean) / (stddev + 1e-8);
    }

    const auto mb = static_cast<std::size_t>(cfg.minibatch_size());
    std::vector<std::size_t> order(n);
    PpoStats stats;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (int k = 0; k < cfg.num_minibatches; ++k) {
            PpoBatch batch;
            batch.inputs.resize(agent::kInputSize, static_cast<Eigen::Index>(mb));
            batch.old_logprobs.resize(static_cast<Eigen::Index>(mb));
            batch.old_values.resize(static_cast<Eigen::Index>(mb));
            batch.advantages.resize(static_cast<Eigen::Index>(mb));
            batch.returns.resize(static_cast<Eigen::Index>(mb));
            batch.actions.resize(mb);
            for (std::size_t j = 0; j < mb; ++j) {
                const std::size_t idx = order[static_cast<std::size_t>(k) * mb + j];
                const auto col = static_cast<Eigen::Index>(j);
                batch.inputs.col(col) = buffer.inputs.col(static_cast<Eigen::Index>(idx));
                batch.actions[j] = buffer.actions[idx];
                batch.old_logprobs(col) = buffer.logprobs[idx];
                batch.old_values(col) = buffer.values[idx];
                batch.advantages(col) = adv[idx];
                batch.returns(col) = gae.returns[idx];
            }
            agent::Gradients g;
            const PpoLoss l = ppo_loss(params, batch, cfg, &g);
            if (!std::isfinite(l.total))
                throw NumericError("non-finite PPO loss (policy=" + std::to_string(l.policy) +
                                   ", value=" + std::to_string(l.value) + ")");
            if (cfg.max_grad_norm > 0.0) {
                const double norm = std::sqrt(g.squared_norm());
                if (norm > cfg.max_grad_norm) g *= cfg.max_grad_norm / norm;
            }
            optimizer.step(params, g);
            if (stats.optimizer_steps == 0) stats.first_minibatch_mean_ratio = l.mean_ratio;
            ++stats.optimizer_steps;
            stats.mean.total += l.total;
            stats.mean.policy += l.policy;
            stats.mean.value += l.value;
            stats.mean.entropy += l.entropy;
            stats.mean.mean_ratio += l.mean_ratio;
            stats.mean.clip_fraction += l.clip_fraction;
        }
    }
    const double inv = 1.0 / static_cast<double>(stats.optimizer_steps);
    stats.mean.total *= inv;
    stats.mean.policy *= inv;
    stats.mean.value *= inv;
    stats.mean.entropy *= inv;
    stats.mean.mean_ratio *= inv;
    stats.mean.clip_fraction *= inv;
    return stats;
}

}  // namespace explab::ppo
