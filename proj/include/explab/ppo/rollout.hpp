#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "explab/agent/policy.hpp"
#include "explab/episode.hpp"
#include "explab/gridworld/gridworld.hpp"
#include "explab/intrinsic/rewards.hpp"
#include "explab/ppo/ppo.hpp"
#include "explab/rng.hpp"

namespace explab::ppo {

/// How each new episode picks its level seed.
struct LevelSeedMode {
    enum class Kind { Unbounded, Fixed, Range } kind = Kind::Unbounded;
    std::vector<std::uint64_t> seeds;  // Fixed
    std::uint64_t begin = 0;           // Range [begin, end)
    std::uint64_t end = 0;

    std::uint64_t draw(Rng& rng) const;
};
void validate(const LevelSeedMode& mode);

/// Drives one environment instance with the current policy, auto-resetting on episode end.
class RolloutCollector {
public:
    using EpisodeSink = std::function<void(Episode&&)>;

    RolloutCollector(gridworld::EnvSpec spec, LevelSeedMode seeds, intrinsic::IntrinsicTracker& tracker,
                     gridworld::ObservationOptions obs_options, Rng level_rng);

    /// Takes `steps` environment steps. Completed episodes go to `sink` as they finish.
    RolloutBuffer collect(const agent::PolicyParams& params, int steps, Rng& action_rng, const EpisodeSink& sink);

    std::uint64_t frames() const noexcept { return frames_; }
    std::uint64_t episodes() const noexcept { return episodes_; }
    const gridworld::GridState& state() const noexcept { return state_; }
    const Rng& level_rng() const noexcept { return level_rng_; }

private:
    void reset();
    intrinsic::KeyDigest key_of(const gridworld::GridState& s) const;

    gridworld::EnvSpec spec_;
    LevelSeedMode seeds_;
    intrinsic::IntrinsicTracker& tracker_;
    gridworld::ObservationOptions obs_options_;
    Rng level_rng_;

    gridworld::GridState state_;
    gridworld::Observation obs_;
    intrinsic::KeyDigest key_ = 0;
    Episode current_;
    std::uint64_t frames_ = 0;
    std::uint64_t episodes_ = 0;
};

}  // namespace explab::ppo
