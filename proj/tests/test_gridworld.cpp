#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <queue>
#include <set>

#include "explab/errors.hpp"
#include "explab/gridworld/gridworld.hpp"
#include "explab/rng.hpp"
#include "support/solver.hpp"

using namespace explab;
using namespace explab::gridworld;

namespace {

GridState open_room(int w, int h) {
    GridState s;
    s.width = w;
    s.height = h;
    s.cells.assign(static_cast<std::size_t>(w * h), Cell::empty());
    for (int x = 0; x < w; ++x) {
        s.at({x, 0}) = Cell::wall();
        s.at({x, h - 1}) = Cell::wall();
    }
    for (int y = 0; y < h; ++y) {
        s.at({0, y}) = Cell::wall();
        s.at({w - 1, y}) = Cell::wall();
    }
    s.agent_pos = {1, 1};
    s.max_steps = 100;
    return s;
}

/// Regions of walkable cells separated by walls and doors that border at least one door.
/// Pockets enclosed by neighbouring rooms' walls have no door and are not rooms.
std::vector<std::vector<Pos>> enclosed_rooms(const GridState& s) {
    std::vector<int> label(s.cells.size(), -1);
    std::vector<std::vector<Pos>> rooms;
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const auto id = static_cast<std::size_t>(y * s.width + x);
            const auto t = s.at({x, y}).type;
            if (label[id] >= 0 || t == ObjectType::Wall || t == ObjectType::Door) continue;
            std::vector<Pos> cells;
            bool has_door = false;
            std::queue<Pos> q;
            q.push({x, y});
            label[id] = static_cast<int>(rooms.size());
            while (!q.empty()) {
                const Pos p = q.front();
                q.pop();
                cells.push_back(p);
                for (const Pos d : {Pos{1, 0}, Pos{-1, 0}, Pos{0, 1}, Pos{0, -1}}) {
                    const Pos n{p.x + d.x, p.y + d.y};
                    if (!s.in_bounds(n)) continue;
                    const auto nid = static_cast<std::size_t>(n.y * s.width + n.x);
                    const auto nt = s.at(n).type;
                    if (nt == ObjectType::Door) has_door = true;
                    if (label[nid] >= 0 || nt == ObjectType::Wall || nt == ObjectType::Door) continue;
                    label[nid] = label[id];
                    q.push(n);
                }
            }
            if (has_door) rooms.push_back(std::move(cells));
            else rooms.emplace_back();  // keep label indices aligned
        }
    }
    rooms.erase(std::remove_if(rooms.begin(), rooms.end(), [](const auto& r) { return r.empty(); }), rooms.end());
    return rooms;
}

std::size_t count_cells(const GridState& s, ObjectType t) {
    return static_cast<std::size_t>(std::count_if(s.cells.begin(), s.cells.end(), [&](const Cell& c) { return c.type == t; }));
}

}  // namespace

TEST_CASE("env identifiers parse to the documented parameters") {
    const auto mn = parse_env_spec("MultiRoom-N7-S8");
    CHECK(mn.family == Family::MultiRoom);
    CHECK(mn.num_rooms == 7);
    CHECK(mn.room_size == 8);
    CHECK(mn.max_steps == 140);
    CHECK(parse_env_spec("MultiRoom-N12-S10").max_steps == 240);
    const auto kc = parse_env_spec("KeyCorridor-S4-R3");
    CHECK(kc.room_size == 4);
    CHECK(kc.num_rows == 3);
    CHECK(kc.max_steps == 480);
    CHECK(parse_env_spec("ObstructedMaze-2Dlh").max_steps == 576);
    CHECK(parse_env_spec("Empty-8").size == 8);
    for (const char* id : {"MultiRoom-N7-S8", "KeyCorridor-S4-R3", "ObstructedMaze-2Dlh", "Empty-8"})
        CHECK(to_string(parse_env_spec(id)) == id);
}

TEST_CASE("unsupported env identifiers are configuration errors") {
    for (const char* id : {"", "Empty", "Empty-2", "MultiRoom-N1-S8", "MultiRoom-N7-S3", "MultiRoom-N7", "KeyCorridor-S2-R3",
                           "KeyCorridor-S4-R0", "ObstructedMaze-1Q", "Lava-5", "MultiRoom-N7-S8x"})
        CHECK_THROWS_AS(parse_env_spec(id), ConfigError);
}

TEST_CASE("generation is deterministic per (spec, seed)") {
    for (const char* id : {"Empty-8", "MultiRoom-N7-S8", "KeyCorridor-S4-R3", "ObstructedMaze-2Dlh"}) {
        const auto spec = parse_env_spec(id);
        CHECK(generate(spec, 42) == generate(spec, 42));
        bool any_diff = false;
        for (std::uint64_t s = 1; s < 6; ++s) any_diff = any_diff || !(generate(spec, 0) == generate(spec, s));
        if (spec.family != Family::Empty) CHECK(any_diff);
    }
}

TEST_CASE("MultiRoom levels have N enclosed rooms of side at most S, goal in the last") {
    for (const char* id : {"MultiRoom-N7-S8", "MultiRoom-N12-S10", "MultiRoom-N2-S4"}) {
        const auto spec = parse_env_spec(id);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto s = generate(spec, seed);
            const auto rooms = enclosed_rooms(s);
            REQUIRE(rooms.size() == static_cast<std::size_t>(spec.num_rooms));
            for (const auto& r : rooms) {
                int x0 = 1 << 20, x1 = -1, y0 = 1 << 20, y1 = -1;
                for (Pos p : r) {
                    x0 = std::min(x0, p.x);
                    x1 = std::max(x1, p.x);
                    y0 = std::min(y0, p.y);
                    y1 = std::max(y1, p.y);
                }
                CHECK(x1 - x0 + 3 <= spec.room_size);  // interior + two walls
                CHECK(y1 - y0 + 3 <= spec.room_size);
            }
            CHECK(count_cells(s, ObjectType::Goal) == 1);
            CHECK(count_cells(s, ObjectType::Door) == static_cast<std::size_t>(spec.num_rooms - 1));
            CHECK(s.at(s.agent_pos).can_overlap());
            CHECK(s.objective.kind == Objective::Kind::ReachGoal);
        }
    }
}

TEST_CASE("KeyCorridor and ObstructedMaze place the documented objects") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto kc = generate(parse_env_spec("KeyCorridor-S4-R3"), seed);
        CHECK(kc.objective.kind == Objective::Kind::PickUpBall);
        std::size_t locked = 0;
        for (const auto& c : kc.cells)
            if (c.type == ObjectType::Door && c.door_state() == DoorState::Locked) {
                ++locked;
                CHECK(std::count(kc.cells.begin(), kc.cells.end(), Cell::key(c.color)) == 1);
            }
        CHECK(locked == 1);
        CHECK(count_cells(kc, ObjectType::Ball) == 1);

        const auto om = generate(parse_env_spec("ObstructedMaze-2Dlh"), seed);
        std::size_t om_locked = 0;
        for (const auto& c : om.cells)
            if (c.type == ObjectType::Door && c.door_state() == DoorState::Locked) {
                ++om_locked;
                // The matching key is hidden in a box.
                const bool in_box = std::any_of(om.cells.begin(), om.cells.end(), [&](const Cell& b) {
                    return b.type == ObjectType::Box && b.box_contents() == Cell::key(c.color);
                });
                CHECK(in_box);
            }
        CHECK(om_locked == 2);
        CHECK(count_cells(om, ObjectType::Key) == 0);
        CHECK(count_cells(om, ObjectType::Ball) == 1);
        CHECK(om.max_steps == 576);
    }
}

TEST_CASE("every generated level is solvable within max_steps (planner + replay oracle)") {
    for (const char* id : {"MultiRoom-N7-S8", "MultiRoom-N12-S10", "KeyCorridor-S4-R3", "ObstructedMaze-2Dlh", "Empty-8"}) {
        const auto spec = parse_env_spec(id);
        int solved = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto s = generate(spec, seed);
            const auto plan = testing::plan_solution(s);
            if (plan && plan->size() <= static_cast<std::size_t>(spec.max_steps) && testing::replay_succeeds(s, *plan))
                ++solved;
            else
                MESSAGE(std::string(id) << " seed " << seed << " not solved");
        }
        const std::string env_id = id;
        CAPTURE(env_id);
        CHECK(solved == 100);
    }
}

TEST_CASE("success reward follows 1 - 0.9 t / t_max") {
    for (int t : {1, 50, 100}) {
        GridState s = open_room(4, 3);  // corridor: agent (1,1) facing the goal at (2,1)
        s.at({2, 1}) = Cell::goal();
        s.max_steps = 100;
        for (int i = 0; i < t - 1; ++i) step(s, Action::Done);
        const auto r = step(s, Action::MoveForward);
        CHECK(r.done);
        CHECK(s.success);
        CHECK(r.reward == 1.0 - 0.9 * (t / 100.0));
    }
    GridState s = open_room(5, 5);
    s.max_steps = 3;
    double total = 0.0;
    while (!s.done) total += step(s, Action::TurnLeft).reward;
    CHECK(total == 0.0);
    CHECK(s.step == 3);
    CHECK_FALSE(s.success);
    CHECK_THROWS_AS(step(s, Action::TurnLeft), UsageError);
    CHECK(1.0 - 0.9 * 50.0 / 140.0 == doctest::Approx(0.6786).epsilon(1e-4));
}

TEST_CASE("movement, doors, keys and boxes follow MiniGrid rules") {
    GridState s = open_room(7, 5);
    s.agent_dir = Direction::East;
    step(s, Action::TurnLeft);
    CHECK(s.agent_dir == Direction::North);
    step(s, Action::MoveForward);  // wall ahead: no movement
    CHECK(s.agent_pos == Pos{1, 1});
    step(s, Action::TurnRight);
    step(s, Action::TurnRight);
    CHECK(s.agent_dir == Direction::South);

    SUBCASE("locked door needs the same-colour key") {
        GridState g = open_room(7, 3);
        g.at({3, 1}) = Cell::door(Color::Blue, DoorState::Locked);
        g.at({2, 1}) = Cell::key(Color::Red);
        step(g, Action::PickUp);
        REQUIRE(g.carried == Cell::key(Color::Red));
        step(g, Action::MoveForward);
        CHECK(g.agent_pos == Pos{2, 1});
        step(g, Action::Toggle);
        CHECK(g.at({3, 1}).door_state() == DoorState::Locked);
        step(g, Action::MoveForward);
        CHECK(g.agent_pos == Pos{2, 1});
        g.carried = Cell::key(Color::Blue);
        step(g, Action::Toggle);
        CHECK(g.at({3, 1}).door_state() == DoorState::Open);
        step(g, Action::MoveForward);
        CHECK(g.agent_pos == Pos{3, 1});
    }
    SUBCASE("closed doors toggle both ways") {
        GridState g = open_room(5, 3);
        g.at({2, 1}) = Cell::door(Color::Green, DoorState::Closed);
        step(g, Action::MoveForward);
        CHECK(g.agent_pos == Pos{1, 1});
        step(g, Action::Toggle);
        CHECK(g.at({2, 1}).door_state() == DoorState::Open);
        step(g, Action::Toggle);
        CHECK(g.at({2, 1}).door_state() == DoorState::Closed);
    }
    SUBCASE("boxes release their contents; drop needs an empty tile") {
        GridState g = open_room(5, 3);
        g.at({2, 1}) = Cell::box(Color::Blue, Cell::key(Color::Yellow));
        step(g, Action::PickUp);  // boxes can be carried in MiniGrid
        CHECK(g.carried == Cell::box(Color::Blue, Cell::key(Color::Yellow)));
        step(g, Action::Drop);
        CHECK(g.at({2, 1}).type == ObjectType::Box);
        step(g, Action::Toggle);
        CHECK(g.at({2, 1}) == Cell::key(Color::Yellow));
        g.carried = Cell::ball(Color::Red);
        step(g, Action::Drop);  // occupied
        CHECK(g.carried.has_value());
    }
}

TEST_CASE("cell encoding round-trips and stays in range") {
    std::vector<Cell> cells{Cell::empty(), Cell::wall(), Cell::goal()};
    for (Color c : kAllColors) {
        cells.push_back(Cell::key(c));
        cells.push_back(Cell::ball(c));
        cells.push_back(Cell::box(c));
        for (DoorState d : {DoorState::Open, DoorState::Closed, DoorState::Locked}) cells.push_back(Cell::door(c, d));
    }
    for (const Cell& c : cells) {
        const auto code = encode(c);
        CHECK(code[0] <= kMaxObjectCode);
        CHECK(code[1] <= kMaxColorCode);
        CHECK(code[2] <= kMaxStateCode);
        const auto back = decode(code);
        REQUIRE(back.has_value());
        CHECK(*back == c);
    }
    CHECK_FALSE(decode({11, 0, 0}).has_value());
    CHECK_FALSE(decode({5, 6, 0}).has_value());
    CHECK_FALSE(decode({5, 0, 1}).has_value());
    CHECK(encode(Cell::door(Color::Purple, DoorState::Locked)) == CellCode{4, 3, 2});
}

TEST_CASE("observation geometry: anchor, rotation and borders") {
    GridState s = open_room(9, 9);
    s.agent_pos = {4, 4};
    s.at({4, 2}) = Cell::key(Color::Green);  // two tiles north
    s.at({6, 4}) = Cell::ball(Color::Blue);  // two tiles east
    const CellCode key{5, 1, 0}, ball{6, 2, 0};
    auto tile = [](const Observation& o, int vx, int vy) {
        return CellCode{o.at(vx, vy, 0), o.at(vx, vy, 1), o.at(vx, vy, 2)};
    };
    s.agent_dir = Direction::North;
    auto o = observe(s);
    CHECK(tile(o, 3, 4) == key);
    CHECK(tile(o, 5, 6) == ball);  // to the right
    s.agent_dir = Direction::East;
    o = observe(s);
    CHECK(tile(o, 3, 4) == ball);
    CHECK(tile(o, 1, 6) == key);  // to the left
    s.agent_dir = Direction::South;
    o = observe(s);
    CHECK(tile(o, 1, 6) == ball);
    s.agent_dir = Direction::West;
    o = observe(s);
    CHECK(tile(o, 5, 6) == key);

    // Agent tile shows the carried object.
    CHECK(tile(o, 3, 6) == CellCode{1, 0, 0});
    s.carried = Cell::key(Color::Red);
    CHECK(tile(observe(s), 3, 6) == CellCode{5, 0, 0});

    // At the map edge, the part of the window outside the grid is unseen.
    GridState e = open_room(5, 5);
    e.agent_pos = {1, 1};
    e.agent_dir = Direction::North;
    o = observe(e);
    for (int vy = 0; vy < 5; ++vy)
        for (int vx = 0; vx < 7; ++vx) CHECK(tile(o, vx, vy) == CellCode{0, 0, 0});
    CHECK(tile(o, 3, 5) == CellCode{2, 5, 0});  // wall right in front
    for (int vx = 0; vx < 2; ++vx) CHECK(tile(o, vx, 6) == CellCode{0, 0, 0});
}

TEST_CASE("the four facing directions see rotations of the same world window") {
    GridState s = open_room(11, 11);
    Rng rng(5);
    for (auto& c : s.cells)
        if (c.is_empty() && rng.below(4) == 0) c = Cell::ball(kAllColors[rng.below(6)]);
    s.agent_pos = {5, 5};
    s.at(s.agent_pos) = Cell::empty();
    // World tile seen at view (vx, vy) when facing f is agent + f*(6-vy) + r*(vx-3).
    for (int d = 0; d < 4; ++d) {
        s.agent_dir = static_cast<Direction>(d);
        const auto o = observe(s);
        const Pos f = dir_vec(s.agent_dir), r{-f.y, f.x};
        for (int vx = 0; vx < 7; ++vx)
            for (int vy = 0; vy < 6; ++vy) {
                const Pos w{5 + f.x * (6 - vy) + r.x * (vx - 3), 5 + f.y * (6 - vy) + r.y * (vx - 3)};
                const CellCode want = s.in_bounds(w) ? encode(s.at(w)) : CellCode{0, 0, 0};
                CHECK(CellCode{o.at(vx, vy, 0), o.at(vx, vy, 1), o.at(vx, vy, 2)} == want);
            }
    }
}

TEST_CASE("occlusion hides tiles behind walls when enabled") {
    GridState s = open_room(9, 9);
    s.agent_pos = {4, 6};
    s.agent_dir = Direction::North;
    for (int x = 1; x < 8; ++x) s.at({x, 4}) = Cell::wall();
    const auto open = observe(s, {.occlusion = false});
    const auto occl = observe(s, {.occlusion = true});
    CHECK(open.at(3, 3, 0) == static_cast<std::uint8_t>(ObjectType::Empty));  // (4,3) behind the wall
    CHECK(occl.at(3, 3, 0) == static_cast<std::uint8_t>(ObjectType::Unseen));
    CHECK(occl.at(3, 4, 0) == static_cast<std::uint8_t>(ObjectType::Wall));
    CHECK(occl.at(3, 5, 0) == static_cast<std::uint8_t>(ObjectType::Empty));
}

TEST_CASE("state keys ignore the step counter and separate modes") {
    const auto spec = parse_env_spec("KeyCorridor-S4-R3");
    auto a = generate(spec, 3);
    auto b = a;
    b.step = 17;
    for (auto m : {StateKeyMode::Full, StateKeyMode::Pose, StateKeyMode::Obs}) CHECK(state_key(a, m) == state_key(b, m));
    b.carried = Cell::key(Color::Red);
    CHECK(state_key(a, StateKeyMode::Full) != state_key(b, StateKeyMode::Full));
    CHECK(state_key(a, StateKeyMode::Pose) == state_key(b, StateKeyMode::Pose));
    CHECK(state_key(a, StateKeyMode::Pose).size() == 3);
    CHECK(state_key(a, StateKeyMode::Obs).size() == static_cast<std::size_t>(kObsSize));
    CHECK(parse_state_key_mode("pose") == StateKeyMode::Pose);
    CHECK_THROWS_AS(parse_state_key_mode("cells"), ConfigError);
}

TEST_CASE("box contents are part of the full key") {
    GridState a = open_room(5, 5);
    GridState b = a;
    a.at({2, 2}) = Cell::box(Color::Blue, Cell::key(Color::Red));
    b.at({2, 2}) = Cell::box(Color::Blue, Cell::key(Color::Green));
    CHECK(observe(a) == observe(b));
    CHECK(state_key(a, StateKeyMode::Full) != state_key(b, StateKeyMode::Full));
}

TEST_CASE("pose keys on Empty-8 stay within the pose space over a random walk") {
    auto s = generate(parse_env_spec("Empty-8"), 0);
    s.max_steps = 1 << 20;
    Rng rng(1);
    std::set<std::string> keys;
    for (int t = 0; t < 20000; ++t) {
        keys.insert(state_key(s, StateKeyMode::Pose));
        step(s, static_cast<Action>(rng.below(3)));
        if (s.done) s = generate(parse_env_spec("Empty-8"), 0), s.max_steps = 1 << 20;
    }
    CHECK(keys.size() <= 64u * 4u);
    CHECK(keys.size() >= 4u * 30u);  // the walk covers most of the 36 interior tiles
}

TEST_CASE("every episode ends within max_steps and pays at most one reward") {
    Rng rng(9);
    for (const char* id : {"MultiRoom-N7-S8", "KeyCorridor-S4-R3", "ObstructedMaze-2Dlh", "Empty-8"}) {
        const auto spec = parse_env_spec(id);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto s = generate(spec, seed);
            int rewards = 0;
            while (!s.done) {
                const double r = step(s, static_cast<Action>(rng.below(7))).reward;
                if (r != 0.0) {
                    ++rewards;
                    CHECK(r > 0.1);
                    CHECK(r <= 1.0);
                }
            }
            CHECK(s.step <= spec.max_steps);
            CHECK(rewards <= 1);
            CHECK((s.success || s.step == spec.max_steps));
        }
    }
}

TEST_CASE("ascii render marks walls, goal and agent") {
    const auto s = generate(parse_env_spec("Empty-8"), 0);
    const auto text = render_ascii(s);
    CHECK(text.rfind("########\n#>.....#\n", 0) == 0);
    CHECK(text.find('G') != std::string::npos);
    CHECK(text.find("step 0/256") != std::string::npos);
}

namespace {

/// One line per step: action, reward (%.17g), done flag, hex observation.
std::string observation_stream(const char* env, std::uint64_t seed, std::uint64_t script_seed) {
    auto s = generate(parse_env_spec(env), seed);
    Rng rng(script_seed);
    std::string out;
    auto hex = [](const Observation& o) {
        static const char* digits = "0123456789abcdef";
        std::string h;
        for (auto b : o.tiles) {
            h.push_back(digits[b >> 4]);
            h.push_back(digits[b & 15]);
        }
        return h;
    };
    out += "reset " + hex(observe(s)) + "\n";
    char buf[64];
    while (!s.done) {
        const auto a = static_cast<Action>(rng.below(kNumActions));
        const auto r = step(s, a);
        std::snprintf(buf, sizeof buf, "%d %.17g %d ", static_cast<int>(a), r.reward, r.done ? 1 : 0);
        out += buf + hex(observe(s)) + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("observation streams match the frozen golden files") {
    struct Case {
        const char* env;
        std::uint64_t seed, script;
        const char* file;
    };
    for (const Case& c : {Case{"MultiRoom-N7-S8", 0, 11, "mn7s8_seed0.txt"}, Case{"KeyCorridor-S4-R3", 5, 12, "ks4r3_seed5.txt"},
                          Case{"ObstructedMaze-2Dlh", 3, 13, "o2dlh_seed3.txt"}}) {
        const std::string path = std::string(EXPLAB_GOLDEN_DIR) + "/" + c.file;
        const auto stream = observation_stream(c.env, c.seed, c.script);
        CHECK(stream == observation_stream(c.env, c.seed, c.script));
        if (std::getenv("EXPLAB_RECORD_GOLDEN")) {
            std::ofstream(path) << stream;
            continue;
        }
        std::ifstream in(path);
        REQUIRE_MESSAGE(in.good(), "missing golden file " << path);
        const std::string want((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(stream == want);
    }
}
