#include "explab/ppo/rollout.hpp"

#include "explab/errors.hpp"

namespace explab::ppo {

std::uint64_t LevelSeedMode::draw(Rng& rng) const {
    switch (kind) {
        case Kind::Unbounded: return rng.next_u64() >> 32;
        case Kind::Fixed: return seeds[rng.below(seeds.size())];
        case Kind::Range: return begin + rng.below(end - begin);
    }
    return 0;
}

void validate(const LevelSeedMode& m) {
    if (m.kind == LevelSeedMode::Kind::Fixed && m.seeds.empty())
        throw ConfigError("fixed level-seed mode needs at least one seed");
    if (m.kind == LevelSeedMode::Kind::Range && m.end <= m.begin)
        throw ConfigError("level-seed range must satisfy begin < end");
}

RolloutCollector::RolloutCollector(gridworld::EnvSpec spec, LevelSeedMode seeds,
                                   intrinsic::IntrinsicTracker& tracker,
                                   gridworld::ObservationOptions obs_options, Rng level_rng)
    : spec_(std::move(spec)),
      seeds_(std::move(seeds)),
      tracker_(tracker),
      obs_options_(obs_options),
      level_rng_(level_rng) {
    validate(seeds_);
    reset();
}

intrinsic::KeyDigest RolloutCollector::key_of(const gridworld::GridState& s) const {
    return intrinsic::digest(gridworld::state_key(s, tracker_.config().key_mode, obs_options_));
}

void RolloutCollector::reset() {
    const std::uint64_t seed = seeds_.draw(level_rng_);
    state_ = gridworld::generate(spec_, seed);
    obs_ = gridworld::observe(state_, obs_options_);
    key_ = key_of(state_);
    tracker_.begin_episode(key_);
    current_ = Episode{};
    current_.level_seed = seed;
}

RolloutBuffer RolloutCollector::collect(const agent::PolicyParams& params, int steps, Rng& action_rng,
                                        const EpisodeSink& sink) {
    if (steps <= 0) throw UsageError("collect: steps must be positive");
    const auto n = static_cast<std::size_t>(steps);
    const double beta = tracker_.config().strategy == intrinsic::Strategy::None ? 0.0 : tracker_.config().beta;

    RolloutBuffer buf;
    buf.inputs.resize(agent::kInputSize, steps);
    buf.actions.reserve(n);
    buf.logprobs.reserve(n);
    buf.values.reserve(n);
    buf.rewards_ext.reserve(n);
    buf.rewards_int.reserve(n);
    buf.rewards.reserve(n);
    buf.dones.reserve(n);

    for (int t = 0; t < steps; ++t) {
        auto x = buf.inputs.col(t);
        agent::encode_input_into(obs_, x);
        const auto out = agent::forward(params, buf.inputs.middleCols(t, 1), agent::Heads::Both);
        const auto sampled = agent::sample_action(out.logits.col(0), action_rng);

        const auto action = static_cast<gridworld::Action>(sampled.action);
        const auto result = gridworld::step(state_, action);
        const auto next_key = key_of(state_);
        const double r_int = tracker_.on_transition(key_, next_key);
        ++frames_;

        buf.actions.push_back(sampled.action);
        buf.logprobs.push_back(sampled.logprob);
        buf.values.push_back(out.values(0));
        buf.rewards_ext.push_back(result.reward);
        buf.rewards_int.push_back(r_int);
        buf.rewards.push_back(intrinsic::combine(result.reward, r_int, beta));
        buf.dones.push_back(result.done ? 1 : 0);

        current_.observations.push_back(obs_);
        current_.actions.push_back(sampled.action);
        current_.rewards_ext.push_back(result.reward);
        current_.rewards_int.push_back(r_int);
        current_.state_keys.push_back(key_);

        if (result.done) {
            current_.end_frame = frames_;
            current_.success = state_.success;
            ++episodes_;
            Episode finished = std::move(current_);
            if (sink) sink(std::move(finished));
            reset();
        } else {
            key_ = next_key;
            obs_ = gridworld::observe(state_, obs_options_);
        }
    }

    if (!buf.dones.back()) {
        const auto x = agent::encode_input(obs_);
        buf.bootstrap_value = agent::forward(params, x, agent::Heads::Both).values(0);
    }
    return buf;
}

}  // namespace explab::ppo
