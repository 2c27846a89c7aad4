#include "explab/harness/evaluate.hpp"

#include <cmath>

#include "explab/errors.hpp"
#include "explab/rng.hpp"

namespace explab::harness {

EvalResult evaluate(const agent::PolicyParams& params, const gridworld::EnvSpec& spec, const EvalOptions& options) {
    if (options.seed_end <= options.seed_begin) throw ConfigError("evaluation seed range is empty");
    if (options.episodes == 0) throw ConfigError("evaluation needs at least one episode");
    EvalResult res;
    Rng rng(options.sample_seed, fnv1a64("eval"));
    const std::uint64_t span = options.seed_end - options.seed_begin;
    agent::Matrix input(agent::kInputSize, 1);
    for (std::size_t i = 0; i < options.episodes; ++i) {
        const std::uint64_t seed = options.seed_begin + i % span;
        auto state = gridworld::generate(spec, seed);
        double ret = 0.0;
        while (!state.done) {
            agent::encode_input_into(gridworld::observe(state, options.observation), input.col(0));
            const auto cache = agent::forward(params, input, agent::Heads::ActorOnly);
            const agent::Vector logits = cache.logits.col(0);
            const int a = options.policy == EvalPolicy::Greedy ? agent::greedy_action(logits)
                                                               : agent::sample_action(logits, rng).action;
            ret += gridworld::step(state, static_cast<gridworld::Action>(a)).reward;
        }
        res.seeds.push_back(seed);
        res.returns.push_back(ret);
        res.lengths.push_back(static_cast<std::uint64_t>(state.step));
        if (state.success) res.success_rate += 1.0;
    }
    const double n = static_cast<double>(options.episodes);
    for (double r : res.returns) res.mean += r;
    res.mean /= n;
    for (double r : res.returns) res.std += (r - res.mean) * (r - res.mean);
    res.std = std::sqrt(res.std / n);
    res.success_rate /= n;
    return res;
}

}  // namespace explab::harness
