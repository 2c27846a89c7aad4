#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "explab/errors.hpp"
#include "explab/gridworld/gridworld.hpp"
#include "explab/rng.hpp"

namespace explab::gridworld {

namespace {

constexpr int kMaxPlacementTries = 10000;
constexpr int kNoAgent = -1;

// Alphabetical order of the MiniGrid color names, used where the reference sorts them.
constexpr std::array<Color, 6> kSortedColors{Color::Blue, Color::Green, Color::Grey,
                                             Color::Purple, Color::Red, Color::Yellow};

/// Shared placement helpers. All randomness flows from one per-level Rng.
class LevelBuilder {
public:
    LevelBuilder(const EnvSpec& spec, std::uint64_t seed, int width, int height)
        : rng_(spec_hash(spec), seed) {
        state_.width = width;
        state_.height = height;
        state_.cells.assign(static_cast<std::size_t>(width * height), Cell::empty());
        state_.max_steps = spec.max_steps;
        state_.seed = seed;
        state_.agent_pos = {kNoAgent, kNoAgent};
    }

    int rand_int(int lo, int hi) {
        if (hi <= lo) throw InternalError("rand_int on empty range");
        return static_cast<int>(rng_.range(lo, hi));
    }
    bool rand_bool() { return rng_.coin(); }
    template <class T, std::size_t N>
    T rand_elem(const std::array<T, N>& xs) {
        return xs[static_cast<std::size_t>(rand_int(0, static_cast<int>(N)))];
    }
    template <class T>
    T rand_elem(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(rand_int(0, static_cast<int>(xs.size())))];
    }
    Color rand_color() { return rand_elem(kAllColors); }

    GridState& state() { return state_; }
    Cell& at(int x, int y) { return state_.at({x, y}); }
    void set(int x, int y, const Cell& c) { state_.at({x, y}) = c; }

    void horz_wall(int x, int y, int length) {
        for (int i = 0; i < length; ++i) set(x + i, y, Cell::wall());
    }
    void vert_wall(int x, int y, int length) {
        for (int j = 0; j < length; ++j) set(x, y + j, Cell::wall());
    }
    void wall_rect(int x, int y, int w, int h) {
        horz_wall(x, y, w);
        horz_wall(x, y + h - 1, w);
        vert_wall(x, y, h);
        vert_wall(x + w - 1, y, h);
    }

    /// Rejection-samples an empty tile inside [top, top + size), never on the agent.
    Pos place_obj(std::optional<Cell> obj, Pos top, Pos size,
                  const std::function<bool(Pos)>& reject = nullptr) {
        top = {std::max(top.x, 0), std::max(top.y, 0)};
        for (int tries = 0; tries < kMaxPlacementTries; ++tries) {
            const Pos p{rand_int(top.x, std::min(top.x + size.x, state_.width)),
                        rand_int(top.y, std::min(top.y + size.y, state_.height))};
            if (!at(p.x, p.y).is_empty()) continue;
            if (p == state_.agent_pos) continue;
            if (reject && reject(p)) continue;
            if (obj) set(p.x, p.y, *obj);
            return p;
        }
        throw InternalError("object placement failed: no free tile");
    }

    Pos place_agent(Pos top, Pos size, bool rand_dir = true) {
        state_.agent_pos = {kNoAgent, kNoAgent};
        const Pos p = place_obj(std::nullopt, top, size);
        state_.agent_pos = p;
        if (rand_dir) state_.agent_dir = static_cast<Direction>(rand_int(0, 4));
        return p;
    }

private:
    Rng rng_;
    GridState state_;
};

// ---------------------------------------------------------------------------

GridState generate_empty(const EnvSpec& spec, std::uint64_t seed) {
    LevelBuilder b(spec, seed, spec.size, spec.size);
    b.wall_rect(0, 0, spec.size, spec.size);
    b.set(spec.size - 2, spec.size - 2, Cell::goal());
    b.state().agent_pos = {1, 1};
    b.state().agent_dir = Direction::East;
    b.state().objective = {Objective::Kind::ReachGoal, Color::Green};
    return std::move(b.state());
}

// ---------------------------------------------------------------------------
// MultiRoom: a chain of rooms grown by recursive placement on a 25x25 canvas.

struct ChainRoom {
    Pos top;
    Pos size;
    Pos entry_door;
};

class MultiRoomGenerator {
public:
    MultiRoomGenerator(LevelBuilder& b, int max_room_size) : b_(b), max_size_(max_room_size) {}

    bool place_room(int num_left, std::vector<ChainRoom>& rooms, int entry_wall, Pos entry) {
        const int size_x = b_.rand_int(4, max_size_ + 1);
        const int size_y = b_.rand_int(4, max_size_ + 1);
        int top_x = 0;
        int top_y = 0;
        if (rooms.empty()) {
            top_x = entry.x;
            top_y = entry.y;
        } else if (entry_wall == 0) {
            top_x = entry.x - size_x + 1;
            top_y = b_.rand_int(entry.y - size_y + 2, entry.y);
        } else if (entry_wall == 1) {
            top_x = b_.rand_int(entry.x - size_x + 2, entry.x);
            top_y = entry.y - size_y + 1;
        } else if (entry_wall == 2) {
            top_x = entry.x;
            top_y = b_.rand_int(entry.y - size_y + 2, entry.y);
        } else {
            top_x = b_.rand_int(entry.x - size_x + 2, entry.x);
            top_y = entry.y;
        }

        const int width = b_.state().width;
        const int height = b_.state().height;
        if (top_x < 0 || top_y < 0) return false;
        if (top_x + size_x > width || top_y + size_y >= height) return false;

        // The room we attach to shares a wall with us and is exempt.
        for (std::size_t i = 0; i + 1 < rooms.size(); ++i) {
            const auto& r = rooms[i];
            const bool non_overlap = top_x + size_x < r.top.x || r.top.x + r.size.x <= top_x ||
                                     top_y + size_y < r.top.y || r.top.y + r.size.y <= top_y;
            if (!non_overlap) return false;
        }

        rooms.push_back({{top_x, top_y}, {size_x, size_y}, entry});
        if (num_left == 1) return true;

        for (int attempt = 0; attempt < 8; ++attempt) {
            std::vector<int> walls;
            for (int w = 0; w < 4; ++w)
                if (w != entry_wall) walls.push_back(w);
            const int exit_wall = b_.rand_elem(walls);
            const int next_entry_wall = (exit_wall + 2) % 4;
            Pos exit{};
            if (exit_wall == 0) {
                exit = {top_x + size_x - 1, top_y + b_.rand_int(1, size_y - 1)};
            } else if (exit_wall == 1) {
                exit = {top_x + b_.rand_int(1, size_x - 1), top_y + size_y - 1};
            } else if (exit_wall == 2) {
                exit = {top_x, top_y + b_.rand_int(1, size_y - 1)};
            } else {
                exit = {top_x + b_.rand_int(1, size_x - 1), top_y};
            }
            if (place_room(num_left - 1, rooms, next_entry_wall, exit)) break;
        }
        return true;
    }

private:
    LevelBuilder& b_;
    int max_size_;
};

GridState generate_multiroom(const EnvSpec& spec, std::uint64_t seed) {
    constexpr int kCanvas = 25;
    constexpr int kMaxLayoutAttempts = 200000;
    LevelBuilder b(spec, seed, kCanvas, kCanvas);
    MultiRoomGenerator gen(b, spec.room_size);

    std::vector<ChainRoom> rooms;
    int attempts = 0;
    while (static_cast<int>(rooms.size()) < spec.num_rooms) {
        if (++attempts > kMaxLayoutAttempts)
            throw ConfigError("MultiRoom layout with " + std::to_string(spec.num_rooms) + " rooms not found");
        std::vector<ChainRoom> candidate;
        const Pos entry{b.rand_int(0, kCanvas - 2), b.rand_int(0, kCanvas - 2)};
        gen.place_room(spec.num_rooms, candidate, 2, entry);
        if (candidate.size() > rooms.size()) rooms = std::move(candidate);
    }

    std::optional<Color> prev_door_color;
    for (std::size_t idx = 0; idx < rooms.size(); ++idx) {
        const auto& room = rooms[idx];
        b.wall_rect(room.top.x, room.top.y, room.size.x, room.size.y);
        if (idx > 0) {
            std::vector<Color> choices;
            for (Color c : kSortedColors)
                if (!prev_door_color || c != *prev_door_color) choices.push_back(c);
            const Color door_color = b.rand_elem(choices);
            b.set(room.entry_door.x, room.entry_door.y, Cell::door(door_color, DoorState::Closed));
            prev_door_color = door_color;
        }
    }

    b.place_agent(rooms.front().top, rooms.front().size);
    b.place_obj(Cell::goal(), rooms.back().top, rooms.back().size);
    b.state().objective = {Objective::Kind::ReachGoal, Color::Green};
    return std::move(b.state());
}

// ---------------------------------------------------------------------------
// RoomGrid: a rows x cols lattice of square rooms sharing walls.

struct LatticeRoom {
    Pos top;
    Pos size;
    std::array<bool, 4> linked{};     // door or removed wall on this side
    std::array<bool, 4> has_door{};
    std::array<std::optional<Pos>, 4> door_pos{};
    std::array<int, 4> neighbor{-1, -1, -1, -1};
    bool locked = false;
};

class RoomGrid {
public:
    RoomGrid(LevelBuilder& b, int room_size, int num_rows, int num_cols)
        : b_(b), room_size_(room_size), rows_(num_rows), cols_(num_cols) {
        rooms_.resize(static_cast<std::size_t>(rows_ * cols_));
        for (int j = 0; j < rows_; ++j) {
            for (int i = 0; i < cols_; ++i) {
                auto& r = room(i, j);
                r.top = {i * (room_size_ - 1), j * (room_size_ - 1)};
                r.size = {room_size_, room_size_};
                b_.wall_rect(r.top.x, r.top.y, room_size_, room_size_);
            }
        }
        // Door positions in order right, down, left, up.
        for (int j = 0; j < rows_; ++j) {
            for (int i = 0; i < cols_; ++i) {
                auto& r = room(i, j);
                const int xl = r.top.x + 1;
                const int yl = r.top.y + 1;
                const int xm = r.top.x + r.size.x - 1;
                const int ym = r.top.y + r.size.y - 1;
                if (i < cols_ - 1) {
                    r.neighbor[0] = index(i + 1, j);
                    r.door_pos[0] = Pos{xm, b_.rand_int(yl, ym)};
                }
                if (j < rows_ - 1) {
                    r.neighbor[1] = index(i, j + 1);
                    r.door_pos[1] = Pos{b_.rand_int(xl, xm), ym};
                }
                if (i > 0) {
                    r.neighbor[2] = index(i - 1, j);
                    r.door_pos[2] = room(i - 1, j).door_pos[0];
                }
                if (j > 0) {
                    r.neighbor[3] = index(i, j - 1);
                    r.door_pos[3] = room(i, j - 1).door_pos[1];
                }
            }
        }
        b_.state().agent_pos = {(cols_ / 2) * (room_size_ - 1) + room_size_ / 2,
                                (rows_ / 2) * (room_size_ - 1) + room_size_ / 2};
        b_.state().agent_dir = Direction::East;
    }

    int index(int i, int j) const { return j * cols_ + i; }
    LatticeRoom& room(int i, int j) { return rooms_[static_cast<std::size_t>(index(i, j))]; }
    LatticeRoom& room_at(Pos p) {
        return room(p.x / (room_size_ - 1), p.y / (room_size_ - 1));
    }

    Pos place_in_room(int i, int j, const Cell& obj) {
        const auto& r = room(i, j);
        const Pos agent = b_.state().agent_pos;
        return b_.place_obj(obj, r.top, r.size, [agent](Pos p) {
            return std::abs(agent.x - p.x) + std::abs(agent.y - p.y) < 2;
        });
    }

    Pos add_object(int i, int j, ObjectType kind, std::optional<Color> color) {
        const Color c = color ? *color : b_.rand_color();
        Cell obj;
        switch (kind) {
            case ObjectType::Key: obj = Cell::key(c); break;
            case ObjectType::Ball: obj = Cell::ball(c); break;
            case ObjectType::Box: obj = Cell::box(c); break;
            default: throw InternalError("add_object: unsupported kind");
        }
        return place_in_room(i, j, obj);
    }

    /// Returns the door color.
    Color add_door(int i, int j, std::optional<int> door_idx, std::optional<Color> color,
                   std::optional<bool> locked) {
        auto& r = room(i, j);
        int k = 0;
        if (door_idx) {
            k = *door_idx;
        } else {
            do {
                k = b_.rand_int(0, 4);
            } while (!(r.neighbor[k] >= 0 && !r.linked[k]));
        }
        const Color c = color ? *color : b_.rand_color();
        const bool is_locked = locked ? *locked : b_.rand_bool();
        if (r.linked[k]) throw InternalError("door already exists");
        if (r.neighbor[k] < 0 || !r.door_pos[k]) throw InternalError("no neighbor behind this wall");
        r.locked = is_locked;
        const Pos p = *r.door_pos[k];
        b_.set(p.x, p.y, Cell::door(c, is_locked ? DoorState::Locked : DoorState::Closed));
        auto& n = rooms_[static_cast<std::size_t>(r.neighbor[k])];
        r.linked[k] = r.has_door[k] = true;
        n.linked[(k + 2) % 4] = n.has_door[(k + 2) % 4] = true;
        return c;
    }

    void remove_wall(int i, int j, int k) {
        auto& r = room(i, j);
        if (r.has_door[k]) throw InternalError("door exists on this wall");
        if (r.neighbor[k] < 0) throw InternalError("invalid wall");
        const int tx = r.top.x;
        const int ty = r.top.y;
        const int w = r.size.x;
        const int h = r.size.y;
        if (k == 0) {
            for (int t = 1; t < h - 1; ++t) b_.set(tx + w - 1, ty + t, Cell::empty());
        } else if (k == 1) {
            for (int t = 1; t < w - 1; ++t) b_.set(tx + t, ty + h - 1, Cell::empty());
        } else if (k == 2) {
            for (int t = 1; t < h - 1; ++t) b_.set(tx, ty + t, Cell::empty());
        } else {
            for (int t = 1; t < w - 1; ++t) b_.set(tx + t, ty, Cell::empty());
        }
        auto& n = rooms_[static_cast<std::size_t>(r.neighbor[k])];
        r.linked[k] = true;
        n.linked[(k + 2) % 4] = true;
    }

    /// Places the agent in room (i, j), never directly facing an object.
    void place_agent(int i, int j) {
        const auto& r = room(i, j);
        for (int tries = 0; tries < kMaxPlacementTries; ++tries) {
            b_.place_agent(r.top, r.size, true);
            const Pos f = b_.state().front_pos();
            const Cell& front = b_.at(f.x, f.y);
            if (front.is_empty() || front.type == ObjectType::Wall) return;
        }
        throw InternalError("agent placement failed");
    }

    /// Adds unlocked doors until every room is reachable from the agent's room.
    void connect_all() {
        constexpr int kMaxIterations = 5000;
        const int start = [&] {
            const Pos a = b_.state().agent_pos;
            return index(a.x / (room_size_ - 1), a.y / (room_size_ - 1));
        }();
        for (int it = 0;; ++it) {
            if (it > kMaxIterations) throw InternalError("connect_all failed");
            if (reachable_count(start) == rows_ * cols_) return;
            const int i = b_.rand_int(0, cols_);
            const int j = b_.rand_int(0, rows_);
            const int k = b_.rand_int(0, 4);
            auto& r = room(i, j);
            if (!r.door_pos[k] || r.linked[k]) continue;
            if (r.locked || rooms_[static_cast<std::size_t>(r.neighbor[k])].locked) continue;
            const Color c = b_.rand_elem(kAllColors);
            add_door(i, j, k, c, false);
        }
    }

private:
    int reachable_count(int start) const {
        std::vector<bool> seen(rooms_.size(), false);
        std::vector<int> stack{start};
        int count = 0;
        while (!stack.empty()) {
            const int r = stack.back();
            stack.pop_back();
            if (seen[static_cast<std::size_t>(r)]) continue;
            seen[static_cast<std::size_t>(r)] = true;
            ++count;
            const auto& room = rooms_[static_cast<std::size_t>(r)];
            for (int k = 0; k < 4; ++k)
                if (room.linked[k]) stack.push_back(room.neighbor[k]);
        }
        return count;
    }

    LevelBuilder& b_;
    int room_size_;
    int rows_;
    int cols_;
    std::vector<LatticeRoom> rooms_;
};

GridState generate_key_corridor(const EnvSpec& spec, std::uint64_t seed) {
    constexpr int kCols = 3;
    const int s = spec.room_size;
    const int rows = spec.num_rows;
    LevelBuilder b(spec, seed, (s - 1) * kCols + 1, (s - 1) * rows + 1);
    RoomGrid g(b, s, rows, kCols);

    // The middle column becomes one hallway.
    for (int j = 1; j < rows; ++j) g.remove_wall(1, j, 3);

    const int room_idx = b.rand_int(0, rows);
    const Color door_color = g.add_door(2, room_idx, 2, std::nullopt, true);
    const Color ball_color = b.rand_color();
    g.add_object(2, room_idx, ObjectType::Ball, ball_color);
    g.add_object(0, b.rand_int(0, rows), ObjectType::Key, door_color);
    g.place_agent(1, rows / 2);
    g.connect_all();
    b.state().objective = {Objective::Kind::PickUpBall, ball_color};
    return std::move(b.state());
}

// ObstructedMaze-2Dlh: agent in the right-middle room, two locked doors whose keys
// are hidden in boxes next to the agent, red target ball in the top-right corner room.
GridState generate_obstructed_maze(const EnvSpec& spec, std::uint64_t seed) {
    constexpr int kRoomSize = 6;
    constexpr int kRows = 3;
    constexpr int kCols = 3;
    LevelBuilder b(spec, seed, (kRoomSize - 1) * kCols + 1, (kRoomSize - 1) * kRows + 1);
    RoomGrid g(b, kRoomSize, kRows, kCols);

    // Random permutation of the six colors.
    std::vector<Color> pool(kAllColors.begin(), kAllColors.end());
    std::vector<Color> door_colors;
    while (!pool.empty()) {
        const auto idx = static_cast<std::size_t>(b.rand_int(0, static_cast<int>(pool.size())));
        door_colors.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    const Color target_color = Color::Red;
    const Color box_color = Color::Blue;

    constexpr int kQuarter = 0;  // side room (2, 1), reached from the center through the right wall
    g.add_door(1, 1, kQuarter, door_colors[0], false);
    for (int k : {-1, 1}) {
        const int idx = (kQuarter + k + 4) % 4;
        const auto n = static_cast<int>(door_colors.size());
        const Color c = door_colors[static_cast<std::size_t>(((kQuarter + k) % n + n) % n)];
        g.add_door(2, 1, idx, c, true);
        g.place_in_room(2, 1, Cell::box(box_color, Cell::key(c)));
    }
    const std::array<Pos, 1> corners{Pos{2, 0}};
    const Pos ball_room = b.rand_elem(corners);
    g.add_object(ball_room.x, ball_room.y, ObjectType::Ball, target_color);
    g.place_agent(2, 1);
    b.state().objective = {Objective::Kind::PickUpBall, target_color};
    return std::move(b.state());
}

}  // namespace

GridState generate(const EnvSpec& spec, std::uint64_t seed) {
    validate(spec);
    switch (spec.family) {
        case Family::Empty: return generate_empty(spec, seed);
        case Family::MultiRoom: return generate_multiroom(spec, seed);
        case Family::KeyCorridor: return generate_key_corridor(spec, seed);
        case Family::ObstructedMaze: return generate_obstructed_maze(spec, seed);
    }
    throw ConfigError("unknown environment family");
}

}  // namespace explab::gridworld
