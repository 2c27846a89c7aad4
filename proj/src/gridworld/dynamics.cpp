#include "explab/errors.hpp"
#include "explab/gridworld/gridworld.hpp"

namespace explab::gridworld {

std::string_view to_string(Action a) noexcept {
    switch (a) {
        case Action::TurnLeft: return "turn_left";
        case Action::TurnRight: return "turn_right";
        case Action::MoveForward: return "move_forward";
        case Action::PickUp: return "pick_up";
        case Action::Drop: return "drop";
        case Action::Toggle: return "toggle";
        case Action::Done: return "done";
    }
    return "?";
}

namespace {

double success_reward(const GridState& s) {
    return 1.0 - 0.9 * (static_cast<double>(s.step) / static_cast<double>(s.max_steps));
}

void toggle(GridState& s, Pos p) {
    Cell& c = s.at(p);
    if (c.type == ObjectType::Door) {
        switch (c.door_state()) {
            case DoorState::Locked:
                if (s.carried && s.carried->type == ObjectType::Key && s.carried->color == c.color)
                    c.state = static_cast<std::uint8_t>(DoorState::Open);
                break;
            case DoorState::Closed: c.state = static_cast<std::uint8_t>(DoorState::Open); break;
            case DoorState::Open: c.state = static_cast<std::uint8_t>(DoorState::Closed); break;
        }
    } else if (c.type == ObjectType::Box) {
        const auto contents = c.box_contents();
        c = contents ? *contents : Cell::empty();
    }
}

}  // namespace

StepResult step(GridState& s, Action action) {
    if (s.done) throw UsageError("step() called on a finished episode");
    ++s.step;
    StepResult result;

    const Pos fwd = s.front_pos();
    const bool fwd_in = s.in_bounds(fwd);

    switch (action) {
        case Action::TurnLeft: s.agent_dir = static_cast<Direction>((static_cast<int>(s.agent_dir) + 3) % 4); break;
        case Action::TurnRight: s.agent_dir = static_cast<Direction>((static_cast<int>(s.agent_dir) + 1) % 4); break;
        case Action::MoveForward:
            if (fwd_in && s.at(fwd).can_overlap()) {
                s.agent_pos = fwd;
                const ObjectType t = s.at(fwd).type;
                if (t == ObjectType::Goal && s.objective.kind == Objective::Kind::ReachGoal) {
                    s.done = true;
                    s.success = true;
                    result.reward = success_reward(s);
                } else if (t == ObjectType::Lava) {
                    s.done = true;
                }
            }
            break;
        case Action::PickUp:
            if (fwd_in && !s.carried && s.at(fwd).can_pickup()) {
                s.carried = s.at(fwd);
                s.at(fwd) = Cell::empty();
                if (s.objective.kind == Objective::Kind::PickUpBall && s.carried->type == ObjectType::Ball &&
                    s.carried->color == s.objective.ball_color) {
                    s.done = true;
                    s.success = true;
                    result.reward = success_reward(s);
                }
            }
            break;
        case Action::Drop:
            if (fwd_in && s.carried && s.at(fwd).is_empty()) {
                s.at(fwd) = *s.carried;
                s.carried.reset();
            }
            break;
        case Action::Toggle:
            if (fwd_in) toggle(s, fwd);
            break;
        case Action::Done: break;
    }

    if (s.step >= s.max_steps) s.done = true;
    result.done = s.done;
    return result;
}

}  // namespace explab::gridworld
