#include "explab/intrinsic/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "explab/errors.hpp"

namespace explab::intrinsic {

Strategy parse_strategy(std::string_view s) {
    if (s == "none") return Strategy::None;
    if (s == "bebold") return Strategy::BeBold;
    if (s == "counts") return Strategy::Counts;
    if (s == "counts1st") return Strategy::Counts1st;
    throw ConfigError("unknown intrinsic strategy: " + std::string(s));
}

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::None: return "none";
        case Strategy::BeBold: return "bebold";
        case Strategy::Counts: return "counts";
        case Strategy::Counts1st: return "counts1st";
    }
    return "?";
}

void validate(const IntrinsicConfig& cfg) {
    if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) throw ConfigError("intrinsic beta must be finite and >= 0");
}

double bebold_reward(const CountTable& table, KeyDigest prev, KeyDigest next, EpisodeVisitSet& visits) {
    const auto n_prev = table.count(prev);
    const auto n_next = table.count(next);
    if (n_prev == 0 || n_next == 0) throw InternalError("bebold_reward: state queried before being counted");
    const bool first = visits.insert(next);
    if (!first) return 0.0;
    return std::max(1.0 / static_cast<double>(n_next) - 1.0 / static_cast<double>(n_prev), 0.0);
}

double counts_reward(const CountTable& table, KeyDigest next, bool first_visit_only, EpisodeVisitSet& visits) {
    const auto n_next = table.count(next);
    if (n_next == 0) throw InternalError("counts_reward: state queried before being counted");
    const bool first = visits.insert(next);
    if (first_visit_only && !first) return 0.0;
    return 1.0 / std::sqrt(static_cast<double>(n_next));
}

double combine(double r_ext, double r_int, double beta) noexcept { return r_ext + beta * r_int; }

IntrinsicTracker::IntrinsicTracker(IntrinsicConfig cfg) : cfg_(cfg) { validate(cfg_); }

void IntrinsicTracker::begin_episode(KeyDigest initial) {
    table_.record_visit(initial);
    visits_.clear();
    visits_.insert(initial);
}

double IntrinsicTracker::on_transition(KeyDigest prev, KeyDigest next) {
    table_.record_visit(next);
    switch (cfg_.strategy) {
        case Strategy::None: visits_.insert(next); return 0.0;
        case Strategy::BeBold: return bebold_reward(table_, prev, next, visits_);
        case Strategy::Counts: return counts_reward(table_, next, false, visits_);
        case Strategy::Counts1st: return counts_reward(table_, next, true, visits_);
    }
    return 0.0;
}

}  // namespace explab::intrinsic
