#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "explab/agent/adam.hpp"
#include "explab/agent/policy.hpp"
#include "explab/episode.hpp"
#include "explab/rng.hpp"
#include "explab/sil/sum_tree.hpp"

namespace explab::sil {

/// Self-imitation with prioritized replay. The number of updates per episode end comes
/// from the run's schedule (5 by default).
struct SilConfig {
    std::size_t capacity = 10000;
    std::size_t batch_size = 256;
    double loss_weight = 0.1;
    double value_loss_weight = 0.01;
    double alpha = 0.6;
    double beta = 0.1;
    double gamma = 0.99;
    double priority_eps = 1e-6;
};
void validate(const SilConfig& cfg);

/// Discounted extrinsic returns R_t = sum_{k>=t} gamma^(k-t) r_k of one episode.
std::vector<double> monte_carlo_returns(const std::vector<double>& rewards, double gamma);

class SilBuffer {
public:
    explicit SilBuffer(const SilConfig& cfg);

    /// Appends every step with its return; new entries get the current maximum priority.
    /// The oldest entries are overwritten once the buffer is full.
    void push_episode(const Episode& episode);

    struct Batch {
        agent::Matrix inputs;  // 147 x n
        std::vector<int> actions;
        agent::Vector returns;
        agent::Vector weights;  // importance weights, max-normalized to 1
        std::vector<std::size_t> indices;
    };

    /// Proportional draws on priority^alpha with IS weights (N P(i))^-beta / max.
    Batch sample(std::size_t batch_size, Rng& rng) const;

    void update_priority(std::size_t index, double priority);

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    double max_priority() const noexcept { return max_priority_; }
    double priority(std::size_t index) const;
    double stored_return(std::size_t index) const { return returns_.at(index); }
    int stored_action(std::size_t index) const { return actions_.at(index); }
    const SumTree& tree() const noexcept { return tree_; }
    const SilConfig& config() const noexcept { return cfg_; }

    /// "bin_lo,bin_hi,count" over `bins` equal-width bins of [0, max priority].
    void write_priority_histogram(std::ostream& out, int bins = 20) const;

private:
    SilConfig cfg_;
    SumTree tree_;
    std::vector<gridworld::Observation> observations_;
    std::vector<int> actions_;
    std::vector<double> returns_;
    std::vector<double> priorities_;
    std::size_t next_ = 0;
    std::size_t size_ = 0;
    double max_priority_ = 1.0;
};

struct SilLoss {
    double total = 0.0;
    double policy = 0.0;
    double value = 0.0;
    std::size_t positive = 0;  // samples with R > V
};

/// loss_weight * mean(w * -log pi(a|s) * (R - V)+) + value_loss_weight * mean(w * 0.5 (R - V)+^2).
/// The clipped advantage is a constant in the policy term. `clipped_adv` receives (R - V)+ per sample.
SilLoss sil_loss(const agent::PolicyParams& params, const SilBuffer::Batch& batch, const SilConfig& cfg,
                 agent::Gradients* grads, std::vector<double>* clipped_adv = nullptr);

/// Samples a batch, takes one Adam step and resets the sampled priorities to (R - V)+ + eps.
/// Throws NumericError on a non-finite loss.
SilLoss sil_update(agent::PolicyParams& params, agent::Adam& adam, SilBuffer& buffer, Rng& rng);

}  // namespace explab::sil
