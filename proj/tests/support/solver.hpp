#pragma once

#include <optional>
#include <vector>

#include "explab/gridworld/gridworld.hpp"

namespace explab::testing {

/// Scripted planner used as a solvability witness. It navigates with breadth-first search
/// over (x, y, direction), opens doors on the way, fetches keys (opening boxes if needed),
/// unlocks doors, and finally reaches the goal or picks up the target ball. The returned
/// plan has not been validated; callers replay it through step().
std::optional<std::vector<gridworld::Action>> plan_solution(const gridworld::GridState& start);

/// Replays `plan` on a copy of `start`; true iff the episode ends in success.
bool replay_succeeds(const gridworld::GridState& start, const std::vector<gridworld::Action>& plan);

}  // namespace explab::testing
