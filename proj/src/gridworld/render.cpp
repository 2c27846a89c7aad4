#include <sstream>

#include "explab/gridworld/gridworld.hpp"

namespace explab::gridworld {

namespace {

char glyph(const Cell& c) {
    switch (c.type) {
        case ObjectType::Unseen: return '?';
        case ObjectType::Empty: return '.';
        case ObjectType::Wall: return '#';
        case ObjectType::Floor: return '_';
        case ObjectType::Door:
            switch (c.door_state()) {
                case DoorState::Open: return '/';
                case DoorState::Closed: return '+';
                case DoorState::Locked: return 'L';
            }
            return '+';
        case ObjectType::Key: return 'K';
        case ObjectType::Ball: return 'O';
        case ObjectType::Box: return 'B';
        case ObjectType::Goal: return 'G';
        case ObjectType::Lava: return '~';
        case ObjectType::Agent: return '@';
    }
    return '?';
}

char agent_glyph(Direction d) {
    switch (d) {
        case Direction::East: return '>';
        case Direction::South: return 'v';
        case Direction::West: return '<';
        case Direction::North: return '^';
    }
    return '@';
}

}  // namespace

std::string render_ascii(const GridState& s) {
    std::ostringstream out;
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            if (Pos{x, y} == s.agent_pos) {
                out << agent_glyph(s.agent_dir);
            } else {
                out << glyph(s.at({x, y}));
            }
        }
        out << '\n';
    }
    out << "step " << s.step << '/' << s.max_steps;
    if (s.carried) out << "  carrying " << to_string(s.carried->color) << ' ' << to_string(s.carried->type);
    if (s.done) out << (s.success ? "  [solved]" : "  [done]");
    out << '\n';
    return out.str();
}

}  // namespace explab::gridworld
