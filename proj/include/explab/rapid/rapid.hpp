#pragma once

#include <cstddef>

#include "explab/agent/adam.hpp"
#include "explab/agent/policy.hpp"
#include "explab/rapid/ranked_buffer.hpp"
#include "explab/schedule/schedule.hpp"

namespace explab::rapid {

struct RapidConfig {
    std::size_t capacity = 10000;
    std::size_t batch_size = 256;
    ScoreWeights weights;
    double entropy_coef = 0.0;  // optional entropy bonus on the imitation loss
};
void validate(const RapidConfig& cfg);

/// Mean negative log-likelihood of `actions` under the actor, minus entropy_coef times the
/// mean entropy. Fills actor gradients when `grads` is non-null.
double bc_loss(const agent::PolicyParams& params, const agent::Matrix& inputs, const std::vector<int>& actions,
               double entropy_coef, agent::Gradients* grads);

/// One Adam step on bc_loss. Throws NumericError if the loss is not finite.
double bc_update(agent::PolicyParams& params, agent::Adam& adam, const RankedBuffer::Batch& batch,
                 double entropy_coef = 0.0);

/// Ranked buffer plus the imitation step.
class RapidLearner {
public:
    explicit RapidLearner(RapidConfig config = {});

    /// Scores and stores the episode, then asks the scheduler how many imitation updates the
    /// episode end earns. Returns 0 while the buffer is empty. Does not run the updates.
    int score_and_schedule(const Episode& episode, const intrinsic::CountTable& counts,
                           schedule::OffPolicyScheduler& scheduler, const schedule::UpdateLedger& ledger);

    /// score_and_schedule followed by running the granted updates immediately.
    /// Returns the number of updates performed.
    int on_episode_end(const Episode& episode, const intrinsic::CountTable& counts,
                       schedule::OffPolicyScheduler& scheduler, schedule::UpdateLedger& ledger,
                       agent::PolicyParams& params, agent::Adam& adam, Rng& rng);

    /// Runs n imitation updates (none when the buffer is empty); returns the mean loss or 0.
    double run_updates(int n, agent::PolicyParams& params, agent::Adam& adam, Rng& rng);

    const RankedBuffer& buffer() const noexcept { return buffer_; }
    const RapidConfig& config() const noexcept { return config_; }
    const RankedBuffer::InsertReport& last_insert() const noexcept { return last_insert_; }
    std::uint64_t updates_run() const noexcept { return updates_run_; }

private:
    RapidConfig config_;
    RankedBuffer buffer_;
    RankedBuffer::InsertReport last_insert_;
    std::uint64_t updates_run_ = 0;
};

}  // namespace explab::rapid
