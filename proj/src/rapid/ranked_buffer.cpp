#include "explab/rapid/ranked_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "explab/errors.hpp"

namespace explab::rapid {

ScoredEpisode score_episode(const Episode& episode, const intrinsic::CountTable& counts,
                            const ScoreWeights& weights) {
    const std::size_t n = episode.length();
    if (n == 0) throw UsageError("cannot score an empty episode");
    if (episode.state_keys.size() != n || episode.observations.size() != n || episode.rewards_ext.size() != n)
        throw UsageError("episode arrays have inconsistent lengths");

    ScoredEpisode out;
    out.observations = episode.observations;
    out.actions = episode.actions;
    out.level_seed = episode.level_seed;
    out.created_at = episode.end_frame;

    out.s_ext = episode.extrinsic_return();
    std::unordered_set<std::uint64_t> distinct(episode.state_keys.begin(), episode.state_keys.end());
    out.s_local = static_cast<double>(distinct.size()) / static_cast<double>(n);
    double g = 0.0;
    for (auto key : episode.state_keys) {
        const auto c = counts.count(key);
        if (c == 0) throw InternalError("episode state missing from the count table");
        g += 1.0 / std::sqrt(static_cast<double>(c));
    }
    out.s_global = g / static_cast<double>(n);
    out.score = weights.ext * out.s_ext + weights.local * out.s_local + weights.global * out.s_global;
    return out;
}

RankedBuffer::RankedBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("ranked buffer capacity must be positive");
}

RankedBuffer::InsertReport RankedBuffer::insert(ScoredEpisode episode) {
    InsertReport report;
    report.inserted = episode.length();
    if (episode.length() == 0) return report;

    const std::uint64_t id = next_id_++;
    const double score = episode.score;
    // The newcomer has the largest id, so it goes before every block of equal score.
    auto pos = std::find_if(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.episode.score <= score; });
    const auto new_index = static_cast<std::size_t>(pos - blocks_.begin());
    Block block;
    block.retained = episode.length();
    block.id = id;
    block.episode = std::move(episode);
    blocks_.insert(pos, std::move(block));
    size_ += report.inserted;

    while (size_ > capacity_) {
        Block& last = blocks_.back();
        const std::size_t excess = size_ - capacity_;
        const std::size_t cut = std::min(excess, last.retained);
        const bool is_new = blocks_.size() - 1 == new_index;
        last.retained -= cut;
        size_ -= cut;
        if (!is_new) report.evicted += cut;
        if (last.retained == 0) blocks_.pop_back();
    }
    report.retained = new_index < blocks_.size() && blocks_[new_index].id == id ? blocks_[new_index].retained : 0;
    rebuild_prefix();
    return report;
}

void RankedBuffer::rebuild_prefix() {
    prefix_.resize(blocks_.size());
    std::size_t acc = 0;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        acc += blocks_[i].retained;
        prefix_[i] = acc;
    }
}

RankedBuffer::Batch RankedBuffer::sample_batch(std::size_t batch_size, Rng& rng) const {
    if (empty()) throw UsageError("cannot sample from an empty ranked buffer");
    Batch batch;
    batch.inputs.resize(agent::kInputSize, static_cast<Eigen::Index>(batch_size));
    batch.actions.resize(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        const std::size_t flat = rng.below(size_);
        const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), flat);
        const auto b = static_cast<std::size_t>(it - prefix_.begin());
        const std::size_t step = flat - (b == 0 ? 0 : prefix_[b - 1]);
        const auto& ep = blocks_[b].episode;
        agent::encode_input_into(ep.observations[step], batch.inputs.col(static_cast<Eigen::Index>(i)));
        batch.actions[i] = ep.actions[step];
    }
    return batch;
}

std::vector<RankedBuffer::ExperienceRef> RankedBuffer::experiences() const {
    std::vector<ExperienceRef> out;
    out.reserve(size_);
    for (const auto& b : blocks_)
        for (std::size_t s = 0; s < b.retained; ++s) out.push_back({b.id, s, b.episode.score});
    return out;
}

double RankedBuffer::min_score() const {
    if (empty()) throw UsageError("empty ranked buffer has no minimum score");
    return blocks_.back().episode.score;
}

double RankedBuffer::max_score() const {
    if (empty()) throw UsageError("empty ranked buffer has no maximum score");
    return blocks_.front().episode.score;
}

RankedBuffer::ComponentMeans RankedBuffer::component_means(const ScoreWeights& w) const {
    ComponentMeans m;
    if (empty()) return m;
    for (const auto& b : blocks_) {
        const double k = static_cast<double>(b.retained);
        m.ext += k * w.ext * b.episode.s_ext;
        m.local += k * w.local * b.episode.s_local;
        m.global += k * w.global * b.episode.s_global;
    }
    const double n = static_cast<double>(size_);
    m.ext /= n;
    m.local /= n;
    m.global /= n;
    return m;
}

std::map<std::uint64_t, std::size_t> RankedBuffer::seed_histogram() const {
    std::map<std::uint64_t, std::size_t> h;
    for (const auto& b : blocks_) h[b.episode.level_seed] += b.retained;
    return h;
}

void RankedBuffer::write_snapshot_csv(std::ostream& out) const {
    out << "rank,episode_id,step,action,score,s_ext,s_local,s_global,level_seed,created_at\n";
    const auto old_precision = out.precision(17);
    std::size_t rank = 0;
    for (const auto& b : blocks_) {
        const auto& e = b.episode;
        for (std::size_t s = 0; s < b.retained; ++s) {
            out << rank++ << ',' << b.id << ',' << s << ',' << e.actions[s] << ',' << e.score << ',' << e.s_ext << ','
                << e.s_local << ',' << e.s_global << ',' << e.level_seed << ',' << e.created_at << '\n';
        }
    }
    out.precision(old_precision);
}

}  // namespace explab::rapid
