#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "explab/agent/adam.hpp"
#include "explab/agent/checkpoint.hpp"
#include "explab/agent/policy.hpp"
#include "explab/harness/config.hpp"
#include "explab/intrinsic/rewards.hpp"
#include "explab/ppo/rollout.hpp"
#include "explab/rapid/rapid.hpp"
#include "explab/schedule/schedule.hpp"
#include "explab/sil/sil.hpp"

namespace explab::harness {

struct EpisodeRecord {
    std::uint64_t index = 0;
    std::uint64_t end_frame = 0;
    std::uint64_t level_seed = 0;
    std::uint64_t length = 0;
    double return_ext = 0.0;
    double sum_int = 0.0;  // raw intrinsic rewards, unscaled
    double g_ext = 0.0;
    double g_int = 0.0;    // discounted and beta-scaled
    bool success = false;
    double running_mean = 0.0;
};

/// One row of metrics.csv, written after every rollout and its updates.
/// Means over "episodes finished in this rollout" are NaN when none finished.
struct RolloutMetrics {
    std::uint64_t rollout = 0;
    std::uint64_t frames = 0;
    std::uint64_t episodes = 0;
    std::uint64_t episodes_in_rollout = 0;
    double mean_return_rollout = 0.0;
    double running_mean = 0.0;
    double g_ext = 0.0;
    double g_int = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double mean_ratio = 0.0;
    double clip_fraction = 0.0;
    std::uint64_t offpolicy_updates = 0;
    double offpolicy_loss = 0.0;
    std::uint64_t on_policy_total = 0;
    std::uint64_t off_policy_total = 0;
    double slot_xi_per_10 = 0.0;
    std::uint64_t buffer_size = 0;
    double buffer_min_score = 0.0;
    double buffer_max_score = 0.0;
    double buffer_mean_score = 0.0;
    double share_ext = 0.0;
    double share_local = 0.0;
    double share_global = 0.0;
    std::uint64_t top_seed = 0;
    double top_seed_share = 0.0;
    std::uint64_t distinct_states = 0;
};

/// Frozen column order of metrics.csv.
const char* metrics_header() noexcept;
void write_metrics_row(std::ostream& out, const RolloutMetrics& m);

const char* episodes_header() noexcept;
void write_episode_row(std::ostream& out, const EpisodeRecord& e);

/// Ranked-buffer contents per level seed at the end of a metrics slot.
struct CompositionSnapshot {
    std::uint64_t frame = 0;
    std::size_t total = 0;
    std::map<std::uint64_t, std::size_t> per_seed;
};

/// One training run: rollout -> PPO update -> scheduled imitation updates -> metrics.
/// Fully determined by (config, run seed).
class Trainer {
public:
    using EpisodeObserver = std::function<void(const Episode&)>;

    Trainer(const ExperimentConfig& cfg, std::uint64_t run_seed);

    /// Collects one rollout and performs every update it triggers.
    const RolloutMetrics& train_rollout();
    bool finished() const noexcept { return frames_ >= cfg_.total_frames; }
    /// Trains until total_frames; `on_row` sees each metrics row as it is produced.
    void run(const std::function<void(const RolloutMetrics&)>& on_row = {});

    /// Called with every finished episode before it is scored.
    void set_episode_observer(EpisodeObserver obs) { observer_ = std::move(obs); }

    const ExperimentConfig& config() const noexcept { return cfg_; }
    std::uint64_t run_seed() const noexcept { return run_seed_; }
    std::uint64_t frames() const noexcept { return frames_; }
    double running_mean() const noexcept;
    const agent::PolicyParams& params() const noexcept { return params_; }
    const agent::Adam& optimizer() const noexcept { return adam_; }
    const intrinsic::IntrinsicTracker& tracker() const noexcept { return tracker_; }
    const schedule::UpdateLedger& ledger() const noexcept { return ledger_; }
    const rapid::RapidLearner* rapid() const noexcept { return rapid_.get(); }
    const sil::SilBuffer* sil() const noexcept { return sil_.get(); }
    const std::vector<RolloutMetrics>& metrics() const noexcept { return metrics_; }
    const std::vector<EpisodeRecord>& episodes() const noexcept { return episodes_; }
    const std::vector<CompositionSnapshot>& composition() const noexcept { return composition_; }

    agent::Checkpoint checkpoint() const;
    /// Hash over parameters, optimizer, counts, buffers and RNG positions.
    std::uint64_t state_fingerprint() const;

private:
    void on_episode(Episode&& ep);
    void snapshot_composition();
    void fill_buffer_stats(RolloutMetrics& row) const;

    ExperimentConfig cfg_;
    std::uint64_t run_seed_;
    gridworld::EnvSpec spec_;
    intrinsic::IntrinsicTracker tracker_;
    Rng action_rng_;
    Rng ppo_rng_;
    Rng offpolicy_rng_;
    agent::PolicyParams params_;
    agent::Adam adam_;
    ppo::RolloutCollector collector_;
    schedule::OffPolicyScheduler scheduler_;
    schedule::UpdateLedger ledger_;
    std::unique_ptr<rapid::RapidLearner> rapid_;
    std::unique_ptr<sil::SilBuffer> sil_;

    std::uint64_t frames_ = 0;
    std::uint64_t rollouts_ = 0;
    int pending_offpolicy_ = 0;
    std::vector<EpisodeRecord> rollout_episodes_;
    std::deque<double> window_;
    double window_sum_ = 0.0;
    std::vector<RolloutMetrics> metrics_;
    std::vector<EpisodeRecord> episodes_;
    std::vector<CompositionSnapshot> composition_;
    EpisodeObserver observer_;
};

struct RunSummary {
    std::uint64_t run_seed = 0;
    bool ok = true;
    std::string error_kind;
    std::string error;
    std::uint64_t frames = 0;
    std::uint64_t episodes = 0;
    double final_running_mean = 0.0;
    std::filesystem::path dir;
};

/// Trains one seed and writes its artifacts into `dir`: metrics.csv, episodes.csv,
/// slots.csv, composition.csv, timing.csv, and when enabled checkpoint.bin plus the final
/// buffer snapshot. A numeric or internal failure stops the run and writes error.json.
RunSummary run_single(const ExperimentConfig& cfg, std::uint64_t run_seed, const std::filesystem::path& dir);

/// Every run seed (up to cfg.jobs at a time, each fully isolated); writes config.json
/// and summary.json in cfg.output_dir. Runs live in <output_dir>/run_<seed>/.
std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg);

}  // namespace explab::harness
