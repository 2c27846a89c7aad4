#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace explab::gridworld {

// Integer codes match the MiniGrid tile encoding.
enum class ObjectType : std::uint8_t {
    Unseen = 0,
    Empty = 1,
    Wall = 2,
    Floor = 3,
    Door = 4,
    Key = 5,
    Ball = 6,
    Box = 7,
    Goal = 8,
    Lava = 9,
    Agent = 10,
};
inline constexpr std::uint8_t kMaxObjectCode = 10;

enum class Color : std::uint8_t { Red = 0, Green = 1, Blue = 2, Purple = 3, Yellow = 4, Grey = 5 };
inline constexpr std::uint8_t kMaxColorCode = 5;
inline constexpr std::array<Color, 6> kAllColors{Color::Red,    Color::Green,  Color::Blue,
                                                 Color::Purple, Color::Yellow, Color::Grey};

enum class DoorState : std::uint8_t { Open = 0, Closed = 1, Locked = 2 };
inline constexpr std::uint8_t kMaxStateCode = 2;

std::string_view to_string(ObjectType t) noexcept;
std::string_view to_string(Color c) noexcept;

/// One grid tile. `state` is a DoorState for doors and 0 otherwise.
///
/// Boxes may hide an object; `hidden` holds it in the same 3-byte encoding
/// (0 = empty box). It is not part of the observable encoding.
struct Cell {
    ObjectType type = ObjectType::Empty;
    Color color = Color::Red;
    std::uint8_t state = 0;
    std::uint32_t hidden = 0;

    static Cell empty() noexcept { return {}; }
    static Cell wall() noexcept { return {ObjectType::Wall, Color::Grey, 0, 0}; }
    static Cell goal() noexcept { return {ObjectType::Goal, Color::Green, 0, 0}; }
    static Cell door(Color c, DoorState s) noexcept {
        return {ObjectType::Door, c, static_cast<std::uint8_t>(s), 0};
    }
    static Cell key(Color c) noexcept { return {ObjectType::Key, c, 0, 0}; }
    static Cell ball(Color c) noexcept { return {ObjectType::Ball, c, 0, 0}; }
    static Cell box(Color c, std::optional<Cell> contents = std::nullopt) noexcept;

    bool is_empty() const noexcept { return type == ObjectType::Empty; }
    bool can_overlap() const noexcept;
    bool can_pickup() const noexcept;
    bool see_behind() const noexcept;
    DoorState door_state() const noexcept { return static_cast<DoorState>(state); }
    std::optional<Cell> box_contents() const noexcept;

    friend bool operator==(const Cell&, const Cell&) = default;
};

using CellCode = std::array<std::uint8_t, 3>;

/// Observable (object, color, state) triple.
CellCode encode(const Cell& cell) noexcept;
/// Inverse of `encode` for visible cells. Returns nullopt for out-of-range codes.
std::optional<Cell> decode(const CellCode& code) noexcept;

}  // namespace explab::gridworld
