#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "explab/gridworld/cell.hpp"
#include "explab/gridworld/env_spec.hpp"

namespace explab::gridworld {

struct Pos {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pos&, const Pos&) = default;
};

/// Facing direction; integer codes follow MiniGrid (0 = east, clockwise).
enum class Direction : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };

inline Pos dir_vec(Direction d) noexcept {
    constexpr std::array<Pos, 4> kVec{Pos{1, 0}, Pos{0, 1}, Pos{-1, 0}, Pos{0, -1}};
    return kVec[static_cast<std::size_t>(d)];
}

enum class Action : std::uint8_t {
    TurnLeft = 0,
    TurnRight = 1,
    MoveForward = 2,
    PickUp = 3,
    Drop = 4,
    Toggle = 5,
    Done = 6,
};
inline constexpr int kNumActions = 7;
std::string_view to_string(Action a) noexcept;

/// What ends an episode successfully.
struct Objective {
    enum class Kind : std::uint8_t { ReachGoal, PickUpBall } kind = Kind::ReachGoal;
    Color ball_color = Color::Red;
    friend bool operator==(const Objective&, const Objective&) = default;
};

/// Complete mutable world state of one level instance.
struct GridState {
    int width = 0;
    int height = 0;
    std::vector<Cell> cells;  // row-major, index y * width + x
    Pos agent_pos;
    Direction agent_dir = Direction::East;
    std::optional<Cell> carried;
    int step = 0;
    int max_steps = 0;
    std::uint64_t seed = 0;
    bool done = false;
    bool success = false;
    Objective objective;

    bool in_bounds(Pos p) const noexcept { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
    const Cell& at(Pos p) const { return cells[static_cast<std::size_t>(p.y * width + p.x)]; }
    Cell& at(Pos p) { return cells[static_cast<std::size_t>(p.y * width + p.x)]; }
    Pos front_pos() const noexcept {
        const Pos v = dir_vec(agent_dir);
        return {agent_pos.x + v.x, agent_pos.y + v.y};
    }

    friend bool operator==(const GridState&, const GridState&) = default;
};

}  // namespace explab::gridworld
