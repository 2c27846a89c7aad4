#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "explab/agent/adam.hpp"
#include "explab/agent/policy.hpp"
#include "explab/episode.hpp"
#include "explab/rng.hpp"

namespace explab::ppo {

using agent::Matrix;
using agent::Vector;

struct PpoConfig {
    int rollout_steps = 128;
    int epochs = 4;
    int num_minibatches = 4;
    double clip = 0.2;
    double lr = 1e-4;
    double gamma = 0.99;
    double lambda = 0.95;
    double entropy_coef = 0.01;
    double value_coef = 0.5;
    bool normalize_advantages = true;
    bool clip_value_loss = false;
    double max_grad_norm = 0.0;  // 0 disables gradient-norm clipping

    int minibatch_size() const noexcept { return rollout_steps / num_minibatches; }
};
void validate(const PpoConfig& cfg);

/// T on-policy transitions. dones[t] marks that transition t ended its episode
/// (goal or step limit); bootstrap_value is V(s_T) when the rollout was cut mid-episode.
struct RolloutBuffer {
    Matrix inputs;  // 147 x T
    std::vector<int> actions;
    std::vector<double> logprobs;
    std::vector<double> values;
    std::vector<double> rewards_ext;
    std::vector<double> rewards_int;
    std::vector<double> rewards;  // combined r_ext + beta * r_int
    std::vector<std::uint8_t> dones;
    double bootstrap_value = 0.0;

    std::size_t size() const noexcept { return actions.size(); }
};

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

/// Generalized advantage estimation with episode-boundary masking; returns = advantages + values.
GaeResult compute_gae(const RolloutBuffer& buffer, double gamma, double lambda);

/// Inputs of one optimization minibatch.
struct PpoBatch {
    Matrix inputs;
    std::vector<int> actions;
    Vector old_logprobs;
    Vector old_values;
    Vector advantages;
    Vector returns;
};

struct PpoLoss {
    double total = 0.0;
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;
    double mean_ratio = 0.0;
    double clip_fraction = 0.0;
};

/// policy_loss + value_coef * value_loss - entropy_coef * entropy, each averaged over the batch.
/// policy_loss = -min(r A, clip(r, 1-eps, 1+eps) A); value_loss = (V - R)^2 (or its clipped form).
/// Fills `grads` with the exact gradient when non-null.
PpoLoss ppo_loss(const agent::PolicyParams& params, const PpoBatch& batch, const PpoConfig& cfg,
                 agent::Gradients* grads);

struct PpoStats {
    PpoLoss mean;
    int optimizer_steps = 0;
    double first_minibatch_mean_ratio = 0.0;
};

/// epochs x num_minibatches Adam steps over shuffled minibatches of the rollout.
/// Throws NumericError on a non-finite loss.
PpoStats ppo_update(agent::PolicyParams& params, agent::Adam& optimizer, const RolloutBuffer& buffer,
                    const GaeResult& gae, const PpoConfig& cfg, Rng& rng);

struct EpisodeReturns {
    double g_ext = 0.0;
    double g_int = 0.0;
};

/// gamma-discounted extrinsic return and beta-scaled intrinsic return from the episode start.
EpisodeReturns discounted_returns_episode(const Episode& episode, double gamma, double beta);

}  // namespace explab::ppo
