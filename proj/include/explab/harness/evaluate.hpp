#pragma once

#include <cstdint>
#include <vector>

#include "explab/agent/policy.hpp"
#include "explab/gridworld/env_spec.hpp"
#include "explab/gridworld/gridworld.hpp"

namespace explab::harness {

enum class EvalPolicy { Greedy, Sample };

struct EvalOptions {
    std::uint64_t seed_begin = 0;  // episodes cycle through level seeds [seed_begin, seed_end)
    std::uint64_t seed_end = 100;
    std::size_t episodes = 100;
    EvalPolicy policy = EvalPolicy::Greedy;
    std::uint64_t sample_seed = 0;  // action stream for EvalPolicy::Sample
    gridworld::ObservationOptions observation;
};

struct EvalResult {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    double success_rate = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> returns;
    std::vector<std::uint64_t> lengths;
};

/// Rolls the policy out on the given level seeds. Reads nothing but its arguments, so
/// evaluating never touches a run's counts, buffers or optimizer.
EvalResult evaluate(const agent::PolicyParams& params, const gridworld::EnvSpec& spec, const EvalOptions& options);

}  // namespace explab::harness
