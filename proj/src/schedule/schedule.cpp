#include "explab/schedule/schedule.hpp"

#include <string>

#include "explab/errors.hpp"

namespace explab::schedule {

RatioMode parse_ratio_mode(std::string_view s) {
    if (s == "episode_end") return RatioMode::EpisodeEnd;
    if (s == "fixed") return RatioMode::Fixed;
    throw ConfigError("unknown ratio mode: " + std::string(s));
}

std::string_view to_string(RatioMode m) noexcept {
    return m == RatioMode::EpisodeEnd ? "episode_end" : "fixed";
}

void validate(const RatioPolicy& p) {
    if (p.mode == RatioMode::Fixed && (p.on <= 0 || p.off <= 0))
        throw ConfigError("fixed update ratio components must be positive");
    if (p.updates_per_trigger < 0) throw ConfigError("updates_per_trigger must be non-negative");
}

UpdateLedger::UpdateLedger(std::uint64_t slot_frames) : slot_frames_(slot_frames) {
    if (slot_frames_ == 0) throw ConfigError("ledger slot width must be positive");
}

UpdateLedger::Slot& UpdateLedger::current_slot() {
    const std::uint64_t start = (frames_ / slot_frames_) * slot_frames_;
    if (slots_.empty() || slots_.back().start_frame != start) slots_.push_back({start, 0, 0});
    return slots_.back();
}

void UpdateLedger::record_on_policy(std::uint64_t n) {
    on_ += n;
    current_slot().on_policy += n;
}

void UpdateLedger::record_off_policy(std::uint64_t n) {
    off_ += n;
    current_slot().off_policy += n;
}

void UpdateLedger::advance_frames(std::uint64_t n) { frames_ += n; }

double UpdateLedger::xi_per_10(const Slot& s) noexcept {
    if (s.on_policy == 0) return 0.0;
    return 10.0 * static_cast<double>(s.off_policy) / static_cast<double>(s.on_policy);
}

OffPolicyScheduler::OffPolicyScheduler(RatioPolicy policy) : policy_(policy) { validate(policy_); }

int OffPolicyScheduler::should_update_offpolicy(Event event, const UpdateLedger&) {
    if (policy_.mode == RatioMode::EpisodeEnd) {
        return event == Event::EpisodeEnd ? policy_.updates_per_trigger : 0;
    }
    if (event != Event::RolloutEnd) return 0;
    credit_ += policy_.off;
    int n = 0;
    while (credit_ >= policy_.on) {
        credit_ -= policy_.on;
        ++n;
    }
    return n;
}

}  // namespace explab::schedule
