#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "explab/gridworld/env_spec.hpp"

namespace explab::schedule {

struct RatioPair {
    int on = 0;
    int off = 0;
    friend bool operator==(const RatioPair&, const RatioPair&) = default;
};

/// Expected on:off update counts when imitation runs at every episode end.
///
/// "on" counts PPO rollouts normalized to the 128-step schedule: round(max_steps / 128),
/// i.e. how many 128-step rollouts fit in one maximal episode. "off" counts episode ends:
///   T <= max_steps: the window is one maximal episode, off = round(max_steps / episode_len);
///   T >  max_steps: the window is `on` rollouts of T steps, off = floor(on * T / episode_len),
///                   the number of episodes that complete inside it.
/// Throws ConfigError if episode_len is not in [1, max_steps] or T <= 0.
RatioPair expected_ratio(const gridworld::EnvSpec& spec, int rollout_steps, int episode_len);

struct RatioCell {
    std::string env_label;  // e.g. "MN7S8"
    int max_steps = 0;
    int optimum_steps = 0;
    int rollout_steps = 0;
    std::string phase;  // "Initial" (failing agent, episode_len = max_steps) or "Final" (optimal agent)
    RatioPair published;
    RatioPair computed;
    bool matched = false;
};

/// The 16 ratio cells for MN7S8, MN12S10, KS4R3 and O2Dlh at T = 128 and T = 2048.
std::vector<RatioCell> reproduce_ratio_table();

void write_ratio_table_text(std::ostream& out, const std::vector<RatioCell>& cells);
void write_ratio_table_csv(std::ostream& out, const std::vector<RatioCell>& cells);

}  // namespace explab::schedule
