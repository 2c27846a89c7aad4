#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace explab::schedule {

enum class RatioMode { EpisodeEnd, Fixed };
RatioMode parse_ratio_mode(std::string_view s);
std::string_view to_string(RatioMode m) noexcept;

/// When off-policy (imitation) updates run relative to on-policy (PPO) updates.
///   EpisodeEnd: `updates_per_trigger` updates after every finished episode.
///   Fixed:      `off` updates per `on` rollouts, independent of episode boundaries.
struct RatioPolicy {
    RatioMode mode = RatioMode::EpisodeEnd;
    int on = 1;
    int off = 1;
    int updates_per_trigger = 5;
};
void validate(const RatioPolicy& p);

enum class Event { EpisodeEnd, RolloutEnd };

/// Cumulative and per-time-slot counts of on-policy updates (rollouts), off-policy updates and frames.
class UpdateLedger {
public:
    struct Slot {
        std::uint64_t start_frame = 0;
        std::uint64_t on_policy = 0;
        std::uint64_t off_policy = 0;
    };

    explicit UpdateLedger(std::uint64_t slot_frames = 10000);

    void record_on_policy(std::uint64_t n = 1);
    void record_off_policy(std::uint64_t n);
    void advance_frames(std::uint64_t n);

    std::uint64_t on_policy() const noexcept { return on_; }
    std::uint64_t off_policy() const noexcept { return off_; }
    std::uint64_t frames() const noexcept { return frames_; }
    std::uint64_t slot_frames() const noexcept { return slot_frames_; }
    const std::vector<Slot>& slots() const noexcept { return slots_; }

    /// Off-policy updates per 10 on-policy updates inside one slot (0 when the slot has no PPO update).
    static double xi_per_10(const Slot& s) noexcept;

private:
    Slot& current_slot();

    std::uint64_t slot_frames_;
    std::uint64_t on_ = 0;
    std::uint64_t off_ = 0;
    std::uint64_t frames_ = 0;
    std::vector<Slot> slots_;
};

/// Decides how many off-policy updates to run for an event.
/// In Fixed mode a credit counter adds `off` per rollout and pays out one update per
/// `on` credits, so after k rollouts exactly floor(k * off / on) updates were granted.
class OffPolicyScheduler {
public:
    explicit OffPolicyScheduler(RatioPolicy policy);

    int should_update_offpolicy(Event event, const UpdateLedger& ledger);

    const RatioPolicy& policy() const noexcept { return policy_; }
    std::int64_t credit() const noexcept { return credit_; }

private:
    RatioPolicy policy_;
    std::int64_t credit_ = 0;
};

}  // namespace explab::schedule
