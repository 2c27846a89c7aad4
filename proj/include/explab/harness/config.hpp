#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "explab/gridworld/gridworld.hpp"
#include "explab/intrinsic/rewards.hpp"
#include "explab/ppo/ppo.hpp"
#include "explab/ppo/rollout.hpp"
#include "explab/rapid/rapid.hpp"
#include "explab/schedule/schedule.hpp"
#include "explab/sil/sil.hpp"

namespace explab::harness {

inline constexpr int kSchemaVersion = 1;

enum class Method { Ppo, PpoIm, Rapid, RapidIm, Sil, SilIm };
Method parse_method(std::string_view s);
std::string_view to_string(Method m) noexcept;
bool uses_rapid(Method m) noexcept;
bool uses_sil(Method m) noexcept;
bool uses_intrinsic(Method m) noexcept;

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string env = "MultiRoom-N7-S8";
    Method method = Method::RapidIm;
    intrinsic::IntrinsicConfig intrinsic;
    ppo::PpoConfig ppo;
    rapid::RapidConfig rapid;
    sil::SilConfig sil;
    schedule::RatioPolicy schedule;
    std::uint64_t total_frames = 3'000'000;
    std::vector<std::uint64_t> run_seeds{0, 1, 2};
    ppo::LevelSeedMode level_seeds;
    gridworld::ObservationOptions observation;
    std::uint64_t slot_frames = 10000;
    std::size_t running_mean_window = 100;
    std::string output_dir = "runs/default";
    bool write_checkpoint = true;
    bool write_buffer_snapshot = true;
    std::size_t jobs = 1;  // run seeds executed concurrently
};

/// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& cfg);

/// The intrinsic settings the run actually uses: methods without "+im" get Strategy::None.
intrinsic::IntrinsicConfig effective_intrinsic(const ExperimentConfig& cfg);

/// Unknown keys and wrong types are rejected with ConfigError; missing keys keep defaults.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Reads a JSON config file and applies "dotted.key=value" overrides before parsing.
/// Override values are parsed as JSON when possible and taken as strings otherwise.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
void apply_override(nlohmann::json& doc, std::string_view assignment);

}  // namespace explab::harness
