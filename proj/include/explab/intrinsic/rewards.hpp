#pragma once

#include <string_view>

#include "explab/gridworld/gridworld.hpp"
#include "explab/intrinsic/count_table.hpp"

namespace explab::intrinsic {

enum class Strategy { None, BeBold, Counts, Counts1st };
Strategy parse_strategy(std::string_view s);
std::string_view to_string(Strategy s) noexcept;

struct IntrinsicConfig {
    Strategy strategy = Strategy::BeBold;
    double beta = 0.005;
    gridworld::StateKeyMode key_mode = gridworld::StateKeyMode::Full;
};
void validate(const IntrinsicConfig& cfg);

/// max(1/N(next) - 1/N(prev), 0), paid only on the first visit of `next` in the episode.
/// Both counts must already include the current transition. Marks `next` as visited.
/// Throws InternalError if either count is zero.
double bebold_reward(const CountTable& table, KeyDigest prev, KeyDigest next, EpisodeVisitSet& visits);

/// 1/sqrt(N(next)); with `first_visit_only` a repeat visit within the episode pays 0.
double counts_reward(const CountTable& table, KeyDigest next, bool first_visit_only, EpisodeVisitSet& visits);

/// r_ext + beta * r_int
double combine(double r_ext, double r_int, double beta) noexcept;

/// Per-run bookkeeping: owns the count table and the episodic visit set, and applies
/// the update-then-reward ordering (N(s_next) is incremented before the reward is read).
class IntrinsicTracker {
public:
    explicit IntrinsicTracker(IntrinsicConfig cfg);

    /// Counts the initial state and resets the episodic set to {s_0}.
    void begin_episode(KeyDigest initial);
    /// Counts `next` and returns the raw intrinsic reward for prev -> next (0 for Strategy::None).
    double on_transition(KeyDigest prev, KeyDigest next);

    const IntrinsicConfig& config() const noexcept { return cfg_; }
    const CountTable& table() const noexcept { return table_; }
    CountTable& table() noexcept { return table_; }

private:
    IntrinsicConfig cfg_;
    CountTable table_;
    EpisodeVisitSet visits_;
};

}  // namespace explab::intrinsic
