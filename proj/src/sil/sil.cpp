#include "explab/sil/sil.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "explab/errors.hpp"

namespace explab::sil {

void validate(const SilConfig& cfg) {
    if (cfg.capacity == 0) throw ConfigError("sil.capacity must be positive");
    if (cfg.batch_size == 0) throw ConfigError("sil.batch_size must be positive");
    if (cfg.alpha < 0 || cfg.beta < 0) throw ConfigError("sil.alpha and sil.beta must be non-negative");
    if (cfg.gamma < 0 || cfg.gamma > 1) throw ConfigError("sil.gamma must lie in [0, 1]");
    if (cfg.priority_eps <= 0) throw ConfigError("sil.priority_eps must be positive");
    if (cfg.loss_weight < 0 || cfg.value_loss_weight < 0) throw ConfigError("sil loss weights must be non-negative");
}

std::vector<double> monte_carlo_returns(const std::vector<double>& rewards, double gamma) {
    std::vector<double> out(rewards.size());
    double g = 0.0;
    for (std::size_t t = rewards.size(); t-- > 0;) {
        g = rewards[t] + gamma * g;
        out[t] = g;
    }
    return out;
}

SilBuffer::SilBuffer(const SilConfig& cfg) : cfg_(cfg), tree_(cfg.capacity) {
    validate(cfg_);
    observations_.resize(cfg_.capacity);
    actions_.resize(cfg_.capacity);
    returns_.resize(cfg_.capacity);
    priorities_.resize(cfg_.capacity);
}

void SilBuffer::push_episode(const Episode& episode) {
    const auto returns = monte_carlo_returns(episode.rewards_ext, cfg_.gamma);
    for (std::size_t t = 0; t < episode.length(); ++t) {
        observations_[next_] = episode.observations[t];
        actions_[next_] = episode.actions[t];
        returns_[next_] = returns[t];
        priorities_[next_] = max_priority_;
        tree_.set(next_, std::pow(max_priority_, cfg_.alpha));
        next_ = (next_ + 1) % cfg_.capacity;
        size_ = std::min(size_ + 1, cfg_.capacity);
    }
}

double SilBuffer::priority(std::size_t index) const {
    if (index >= size_) throw UsageError("sil buffer index out of range");
    return priorities_[index];
}

void SilBuffer::update_priority(std::size_t index, double priority) {
    if (index >= size_) throw UsageError("sil buffer index out of range");
    priority = std::max(priority, cfg_.priority_eps);
    priorities_[index] = priority;
    tree_.set(index, std::pow(priority, cfg_.alpha));
    max_priority_ = std::max(max_priority_, priority);
}

SilBuffer::Batch SilBuffer::sample(std::size_t batch_size, Rng& rng) const {
    if (empty()) throw UsageError("cannot sample from an empty sil buffer");
    Batch b;
    b.inputs.resize(agent::kInputSize, static_cast<Eigen::Index>(batch_size));
    b.actions.resize(batch_size);
    b.returns.resize(static_cast<Eigen::Index>(batch_size));
    b.weights.resize(static_cast<Eigen::Index>(batch_size));
    b.indices.resize(batch_size);
    const double total = tree_.total();
    const double n = static_cast<double>(size_);
    double max_w = 0.0;
    for (std::size_t i = 0; i < batch_size; ++i) {
        const std::size_t idx = tree_.find(rng.uniform() * total);
        const auto col = static_cast<Eigen::Index>(i);
        agent::encode_input_into(observations_[idx], b.inputs.col(col));
        b.actions[i] = actions_[idx];
        b.returns(col) = returns_[idx];
        const double p = tree_.get(idx) / total;
        b.weights(col) = std::pow(n * p, -cfg_.beta);
        max_w = std::max(max_w, b.weights(col));
        b.indices[i] = idx;
    }
    b.weights /= max_w;
    return b;
}

void SilBuffer::write_priority_histogram(std::ostream& out, int bins) const {
    if (bins <= 0) throw UsageError("histogram needs at least one bin");
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const double hi = max_priority_;
    for (std::size_t i = 0; i < size_; ++i) {
        auto k = static_cast<int>(priorities_[i] / hi * bins);
        counts[static_cast<std::size_t>(std::clamp(k, 0, bins - 1))]++;
    }
    out << "bin_lo,bin_hi,count\n";
    for (int k = 0; k < bins; ++k)
        out << hi * k / bins << ',' << hi * (k + 1) / bins << ',' << counts[static_cast<std::size_t>(k)] << '\n';
}

SilLoss sil_loss(const agent::PolicyParams& params, const SilBuffer::Batch& batch, const SilConfig& cfg,
                 agent::Gradients* grads, std::vector<double>* clipped_adv) {
    const auto n = batch.inputs.cols();
    if (n == 0) throw UsageError("empty sil batch");
    const auto cache = agent::forward(params, batch.inputs, agent::Heads::Both);
    const double inv_n = 1.0 / static_cast<double>(n);
    agent::Matrix dlogits(agent::kNumActions, n);
    agent::RowVector dvalues(n);
    SilLoss loss;
    if (clipped_adv) clipped_adv->assign(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const agent::Vector logp = agent::log_softmax(cache.logits.col(i));
        const int a = batch.actions[static_cast<std::size_t>(i)];
        const double w = batch.weights(i);
        const double adv = std::max(batch.returns(i) - cache.values(i), 0.0);
        if (adv > 0) ++loss.positive;
        if (clipped_adv) (*clipped_adv)[static_cast<std::size_t>(i)] = adv;
        loss.policy += -logp(a) * adv * w * inv_n;
        loss.value += 0.5 * adv * adv * w * inv_n;
        for (int j = 0; j < agent::kNumActions; ++j) {
            const double p = std::exp(logp(j));
            dlogits(j, i) = cfg.loss_weight * w * adv * (p - (j == a ? 1.0 : 0.0)) * inv_n;
        }
        dvalues(i) = -cfg.value_loss_weight * w * adv * inv_n;
    }
    loss.total = cfg.loss_weight * loss.policy + cfg.value_loss_weight * loss.value;
    if (grads) *grads = agent::backward(params, cache, dlogits, dvalues);
    return loss;
}

SilLoss sil_update(agent::PolicyParams& params, agent::Adam& adam, SilBuffer& buffer, Rng& rng) {
    const auto batch = buffer.sample(buffer.config().batch_size, rng);
    agent::Gradients g;
    std::vector<double> adv;
    const auto loss = sil_loss(params, batch, buffer.config(), &g, &adv);
    if (!std::isfinite(loss.total)) throw NumericError("self-imitation loss is not finite: " + std::to_string(loss.total));
    adam.step(params, g);
    for (std::size_t i = 0; i < batch.indices.size(); ++i)
        buffer.update_priority(batch.indices[i], adv[i] + buffer.config().priority_eps);
    return loss;
}

}  // namespace explab::sil
