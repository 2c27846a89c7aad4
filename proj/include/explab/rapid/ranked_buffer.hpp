#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "explab/agent/policy.hpp"
#include "explab/episode.hpp"
#include "explab/intrinsic/count_table.hpp"
#include "explab/rng.hpp"

namespace explab::rapid {

struct ScoreWeights {
    double ext = 1.0;
    double local = 0.1;
    double global = 0.001;
};

/// An episode with its ranking score. Steps hold the raw observations; they are encoded
/// into policy inputs when sampled, which keeps a 1e4-step buffer at ~1.5 MB.
struct ScoredEpisode {
    std::vector<gridworld::Observation> observations;
    std::vector<int> actions;
    double s_ext = 0.0;
    double s_local = 0.0;
    double s_global = 0.0;
    double score = 0.0;
    std::uint64_t level_seed = 0;
    std::uint64_t created_at = 0;  // frame index of the episode's last step

    std::size_t length() const noexcept { return actions.size(); }
};

/// S_ext = sum of extrinsic rewards, S_local = distinct state keys / length,
/// S_global = mean over steps of 1/sqrt(N(s_t)), S = w0 S_ext + w1 S_local + w2 S_global.
/// `counts` must already include this episode's visits. Throws UsageError on an empty
/// episode and InternalError if a state of the episode has no recorded visit.
ScoredEpisode score_episode(const Episode& episode, const intrinsic::CountTable& counts,
                            const ScoreWeights& weights);

/// Experiences ranked by the score of the episode they came from (frozen at insertion).
/// Ties go to the more recent episode. When over capacity the lowest-ranked experiences are
/// dropped; an episode that straddles the cut keeps its earliest steps.
class RankedBuffer {
public:
    struct InsertReport {
        std::size_t inserted = 0;  // steps offered
        std::size_t retained = 0;  // of those, steps still in the buffer after truncation
        std::size_t evicted = 0;   // steps of older episodes removed
    };

    /// One stored experience in rank order.
    struct ExperienceRef {
        std::uint64_t episode_id = 0;  // insertion sequence number
        std::size_t step = 0;
        double score = 0.0;
    };

    struct Batch {
        agent::Matrix inputs;  // 147 x n
        std::vector<int> actions;
    };

    explicit RankedBuffer(std::size_t capacity = 10000);

    InsertReport insert(ScoredEpisode episode);

    /// Uniform draws with replacement over the retained experiences. Throws UsageError when empty.
    Batch sample_batch(std::size_t batch_size, Rng& rng) const;

    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return size_ == 0; }
    std::size_t num_episodes() const noexcept { return blocks_.size(); }
    std::uint64_t next_episode_id() const noexcept { return next_id_; }

    /// Flattened contents in rank order.
    std::vector<ExperienceRef> experiences() const;
    double min_score() const;
    double max_score() const;

    /// Mean over retained experiences of w0 S_ext, w1 S_local and w2 S_global.
    struct ComponentMeans {
        double ext = 0.0;
        double local = 0.0;
        double global = 0.0;
    };
    ComponentMeans component_means(const ScoreWeights& weights) const;

    /// Retained experiences per level seed.
    std::map<std::uint64_t, std::size_t> seed_histogram() const;

    /// One row per retained experience: rank,episode_id,step,action,score,s_ext,s_local,s_global,level_seed,created_at.
    void write_snapshot_csv(std::ostream& out) const;

private:
    struct Block {
        ScoredEpisode episode;
        std::uint64_t id = 0;
        std::size_t retained = 0;
    };

    void rebuild_prefix();

    std::size_t capacity_;
    std::size_t size_ = 0;
    std::uint64_t next_id_ = 0;
    std::vector<Block> blocks_;         // rank order
    std::vector<std::size_t> prefix_;   // prefix_[i] = experiences in blocks_[0..i]
};

}  // namespace explab::rapid
