#pragma once

#include <cstdint>
#include <vector>

#include "explab/gridworld/gridworld.hpp"

namespace explab {

/// A finished trajectory as seen by the learners. Index t holds the state s_t the
/// action was taken in, the action, and the rewards of the resulting transition.
struct Episode {
    std::vector<gridworld::Observation> observations;
    std::vector<int> actions;
    std::vector<double> rewards_ext;
    std::vector<double> rewards_int;
    std::vector<std::uint64_t> state_keys;  // count-table digests of s_t
    std::uint64_t level_seed = 0;
    std::uint64_t end_frame = 0;
    bool success = false;

    std::size_t length() const noexcept { return actions.size(); }
    double extrinsic_return() const noexcept {
        double s = 0.0;
        for (double r : rewards_ext) s += r;
        return s;
    }
};

}  // namespace explab
