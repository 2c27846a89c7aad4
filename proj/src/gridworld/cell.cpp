#include "explab/gridworld/cell.hpp"

namespace explab::gridworld {

std::string_view to_string(ObjectType t) noexcept {
    switch (t) {
        case ObjectType::Unseen: return "unseen";
        case ObjectType::Empty: return "empty";
        case ObjectType::Wall: return "wall";
        case ObjectType::Floor: return "floor";
        case ObjectType::Door: return "door";
        case ObjectType::Key: return "key";
        case ObjectType::Ball: return "ball";
        case ObjectType::Box: return "box";
        case ObjectType::Goal: return "goal";
        case ObjectType::Lava: return "lava";
        case ObjectType::Agent: return "agent";
    }
    return "?";
}

std::string_view to_string(Color c) noexcept {
    switch (c) {
        case Color::Red: return "red";
        case Color::Green: return "green";
        case Color::Blue: return "blue";
        case Color::Purple: return "purple";
        case Color::Yellow: return "yellow";
        case Color::Grey: return "grey";
    }
    return "?";
}

namespace {
std::uint32_t pack(const CellCode& c) noexcept {
    return (std::uint32_t{c[0]} << 16) | (std::uint32_t{c[1]} << 8) | std::uint32_t{c[2]};
}
}  // namespace

Cell Cell::box(Color c, std::optional<Cell> contents) noexcept {
    Cell b{ObjectType::Box, c, 0, 0};
    if (contents) b.hidden = pack(encode(*contents));
    return b;
}

bool Cell::can_overlap() const noexcept {
    switch (type) {
        case ObjectType::Empty:
        case ObjectType::Floor:
        case ObjectType::Goal:
        case ObjectType::Lava: return true;
        case ObjectType::Door: return door_state() == DoorState::Open;
        default: return false;
    }
}

bool Cell::can_pickup() const noexcept {
    return type == ObjectType::Key || type == ObjectType::Ball || type == ObjectType::Box;
}

bool Cell::see_behind() const noexcept {
    if (type == ObjectType::Wall) return false;
    if (type == ObjectType::Door) return door_state() == DoorState::Open;
    return true;
}

std::optional<Cell> Cell::box_contents() const noexcept {
    if (type != ObjectType::Box || hidden == 0) return std::nullopt;
    return decode({static_cast<std::uint8_t>(hidden >> 16), static_cast<std::uint8_t>(hidden >> 8),
                   static_cast<std::uint8_t>(hidden)});
}

CellCode encode(const Cell& cell) noexcept {
    return {static_cast<std::uint8_t>(cell.type), static_cast<std::uint8_t>(cell.color), cell.state};
}

std::optional<Cell> decode(const CellCode& code) noexcept {
    if (code[0] > kMaxObjectCode || code[1] > kMaxColorCode || code[2] > kMaxStateCode) return std::nullopt;
    const auto type = static_cast<ObjectType>(code[0]);
    if (type != ObjectType::Door && code[2] != 0) return std::nullopt;
    return Cell{type, static_cast<Color>(code[1]), code[2], 0};
}

}  // namespace explab::gridworld
