#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "explab/gridworld/cell.hpp"
#include "explab/gridworld/env_spec.hpp"
#include "explab/gridworld/grid_state.hpp"

namespace explab::gridworld {

inline constexpr int kViewSize = 7;
inline constexpr int kObsSize = kViewSize * kViewSize * 3;

/// Egocentric 7x7x3 tile encoding. The agent sits at view (3, 6) facing view-up.
/// Layout is x-major: index = (vx * 7 + vy) * 3 + channel.
struct Observation {
    std::array<std::uint8_t, kObsSize> tiles{};

    std::uint8_t at(int vx, int vy, int channel) const noexcept {
        return tiles[static_cast<std::size_t>((vx * kViewSize + vy) * 3 + channel)];
    }
    friend bool operator==(const Observation&, const Observation&) = default;
};

struct ObservationOptions {
    /// MiniGrid-style line-of-sight masking. Off by default: the full forward window is visible.
    bool occlusion = false;
};

/// Builds the level for (spec, seed). Same inputs give bit-identical states.
/// Throws ConfigError for unsupported parameters.
GridState generate(const EnvSpec& spec, std::uint64_t seed);

struct StepResult {
    double reward = 0.0;
    bool done = false;
};

/// Advances the world by one action using MiniGrid semantics. The success reward is
/// 1 - 0.9 * t / max_steps, where t is the step count after this action.
/// Throws UsageError when the episode is already finished.
StepResult step(GridState& state, Action action);

Observation observe(const GridState& state, const ObservationOptions& options = {});

enum class StateKeyMode : std::uint8_t { Full, Pose, Obs };
StateKeyMode parse_state_key_mode(std::string_view s);
std::string_view to_string(StateKeyMode m) noexcept;

/// Canonical byte serialization used for visit counting. Never includes the step counter.
///   Full: dimensions, every cell (including box contents), agent pose and carried item.
///   Pose: (x, y, direction).
///   Obs:  the observation bytes.
std::string state_key(const GridState& state, StateKeyMode mode, const ObservationOptions& options = {});

/// Human-readable map: '#' wall, 'G' goal, '.' empty, agent as one of ">v<^".
std::string render_ascii(const GridState& state);

}  // namespace explab::gridworld
