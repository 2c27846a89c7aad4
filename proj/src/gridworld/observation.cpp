#include <array>
#include <string>

#include "explab/errors.hpp"
#include "explab/gridworld/gridworld.hpp"

namespace explab::gridworld {

namespace {

constexpr int kAgentViewX = kViewSize / 2;
constexpr int kAgentViewY = kViewSize - 1;

struct ViewCell {
    Cell cell;
    bool in_bounds = false;
};

using ViewGrid = std::array<std::array<ViewCell, kViewSize>, kViewSize>;  // [vx][vy]

ViewGrid view_window(const GridState& s) {
    const Pos f = dir_vec(s.agent_dir);
    const Pos r{-f.y, f.x};  // agent's right-hand side
    ViewGrid g{};
    for (int vx = 0; vx < kViewSize; ++vx) {
        for (int vy = 0; vy < kViewSize; ++vy) {
            const int ahead = kAgentViewY - vy;
            const int lateral = vx - kAgentViewX;
            const Pos w{s.agent_pos.x + f.x * ahead + r.x * lateral, s.agent_pos.y + f.y * ahead + r.y * lateral};
            auto& v = g[static_cast<std::size_t>(vx)][static_cast<std::size_t>(vy)];
            if (s.in_bounds(w)) {
                v.cell = s.at(w);
                v.in_bounds = true;
            }
        }
    }
    // The agent's own tile shows what it carries.
    auto& self = g[kAgentViewX][kAgentViewY];
    self.cell = s.carried ? *s.carried : Cell::empty();
    self.in_bounds = true;
    return g;
}

// MiniGrid line-of-sight propagation from the agent tile towards the top of the view.
// Out-of-bounds tiles behave as walls.
std::array<std::array<bool, kViewSize>, kViewSize> visibility(const ViewGrid& g) {
    std::array<std::array<bool, kViewSize>, kViewSize> mask{};
    mask[kAgentViewX][kAgentViewY] = true;
    auto blocks = [&](int i, int j) {
        const auto& v = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return !v.in_bounds || !v.cell.see_behind();
    };
    for (int j = kViewSize - 1; j >= 0; --j) {
        for (int i = 0; i < kViewSize - 1; ++i) {
            if (!mask[i][j] || blocks(i, j)) continue;
            mask[i + 1][j] = true;
            if (j > 0) {
                mask[i + 1][j - 1] = true;
                mask[i][j - 1] = true;
            }
        }
        for (int i = kViewSize - 1; i > 0; --i) {
            if (!mask[i][j] || blocks(i, j)) continue;
            mask[i - 1][j] = true;
            if (j > 0) {
                mask[i - 1][j - 1] = true;
                mask[i][j - 1] = true;
            }
        }
    }
    return mask;
}

void put(Observation& o, int vx, int vy, const CellCode& code) {
    const auto base = static_cast<std::size_t>((vx * kViewSize + vy) * 3);
    o.tiles[base] = code[0];
    o.tiles[base + 1] = code[1];
    o.tiles[base + 2] = code[2];
}

}  // namespace

Observation observe(const GridState& s, const ObservationOptions& options) {
    const ViewGrid g = view_window(s);
    Observation o;
    constexpr CellCode kUnseen{static_cast<std::uint8_t>(ObjectType::Unseen), 0, 0};
    if (!options.occlusion) {
        for (int vx = 0; vx < kViewSize; ++vx)
            for (int vy = 0; vy < kViewSize; ++vy) {
                const auto& v = g[static_cast<std::size_t>(vx)][static_cast<std::size_t>(vy)];
                put(o, vx, vy, v.in_bounds ? encode(v.cell) : kUnseen);
            }
        return o;
    }
    const auto mask = visibility(g);
    for (int vx = 0; vx < kViewSize; ++vx)
        for (int vy = 0; vy < kViewSize; ++vy) {
            const auto& v = g[static_cast<std::size_t>(vx)][static_cast<std::size_t>(vy)];
            if (!mask[vx][vy]) {
                put(o, vx, vy, kUnseen);
            } else {
                put(o, vx, vy, v.in_bounds ? encode(v.cell) : encode(Cell::wall()));
            }
        }
    return o;
}

StateKeyMode parse_state_key_mode(std::string_view s) {
    if (s == "full") return StateKeyMode::Full;
    if (s == "pose") return StateKeyMode::Pose;
    if (s == "obs") return StateKeyMode::Obs;
    throw ConfigError("unknown state key mode: " + std::string(s));
}

std::string_view to_string(StateKeyMode m) noexcept {
    switch (m) {
        case StateKeyMode::Full: return "full";
        case StateKeyMode::Pose: return "pose";
        case StateKeyMode::Obs: return "obs";
    }
    return "?";
}

std::string state_key(const GridState& s, StateKeyMode mode, const ObservationOptions& options) {
    std::string key;
    auto push = [&key](std::uint8_t b) { key.push_back(static_cast<char>(b)); };
    switch (mode) {
        case StateKeyMode::Pose:
            push(static_cast<std::uint8_t>(s.agent_pos.x));
            push(static_cast<std::uint8_t>(s.agent_pos.y));
            push(static_cast<std::uint8_t>(s.agent_dir));
            return key;
        case StateKeyMode::Obs: {
            const Observation o = observe(s, options);
            key.assign(o.tiles.begin(), o.tiles.end());
            return key;
        }
        case StateKeyMode::Full: {
            key.reserve(s.cells.size() * 3 + 16);
            push(static_cast<std::uint8_t>(s.width));
            push(static_cast<std::uint8_t>(s.height));
            for (const Cell& c : s.cells) {
                const CellCode code = encode(c);
                push(code[0]);
                push(code[1]);
                push(code[2]);
                if (c.type == ObjectType::Box) {
                    push(static_cast<std::uint8_t>(c.hidden >> 16));
                    push(static_cast<std::uint8_t>(c.hidden >> 8));
                }
            }
            push(static_cast<std::uint8_t>(s.agent_pos.x));
            push(static_cast<std::uint8_t>(s.agent_pos.y));
            push(static_cast<std::uint8_t>(s.agent_dir));
            if (s.carried) {
                const CellCode code = encode(*s.carried);
                push(code[0]);
                push(code[1]);
                push(code[2]);
            } else {
                push(0xff);
            }
            return key;
        }
    }
    return key;
}

}  // namespace explab::gridworld
