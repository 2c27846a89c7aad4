#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "explab/agent/adam.hpp"
#include "explab/agent/policy.hpp"
#include "explab/rng.hpp"

namespace explab::agent {

/// Everything needed to resume or evaluate a run. Saved as a versioned little-endian
/// binary file; doubles are stored bit-for-bit so load(save(x)) == x.
struct Checkpoint {
    std::string env_id;
    std::uint64_t frames = 0;
    PolicyParams params = PolicyParams::zeros();
    Adam optimizer;
    std::vector<std::pair<std::string, Rng>> rng_streams;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws ConfigError on a missing file, bad magic or unsupported version.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace explab::agent
