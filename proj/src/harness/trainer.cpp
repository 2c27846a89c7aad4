#include "explab/harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "explab/errors.hpp"
#include "explab/gridworld/env_spec.hpp"
#include "explab/ppo/ppo.hpp"

namespace explab::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t stream_id(const char* name) { return fnv1a64(name); }

/// Shortest round-trip formatting keeps files exact and byte-stable.
std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t hash_doubles(std::uint64_t h, std::span<const double> xs) {
    for (double x : xs) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &x, sizeof bits);
        h = combine64(h, bits);
    }
    return h;
}

}  // namespace

const char* metrics_header() noexcept {
    return "rollout,frames,episodes,episodes_in_rollout,mean_return_rollout,running_mean,g_ext,g_int,"
           "policy_loss,value_loss,entropy,mean_ratio,clip_fraction,offpolicy_updates,offpolicy_loss,"
           "on_policy_total,off_policy_total,slot_xi_per_10,buffer_size,buffer_min_score,buffer_max_score,"
           "buffer_mean_score,share_ext,share_local,share_global,top_seed,top_seed_share,distinct_states";
}

void write_metrics_row(std::ostream& out, const RolloutMetrics& m) {
    out << m.rollout << ',' << m.frames << ',' << m.episodes << ',' << m.episodes_in_rollout << ','
        << fmt(m.mean_return_rollout) << ',' << fmt(m.running_mean) << ',' << fmt(m.g_ext) << ',' << fmt(m.g_int)
        << ',' << fmt(m.policy_loss) << ',' << fmt(m.value_loss) << ',' << fmt(m.entropy) << ','
        << fmt(m.mean_ratio) << ',' << fmt(m.clip_fraction) << ',' << m.offpolicy_updates << ','
        << fmt(m.offpolicy_loss) << ',' << m.on_policy_total << ',' << m.off_policy_total << ','
        << fmt(m.slot_xi_per_10) << ',' << m.buffer_size << ',' << fmt(m.buffer_min_score) << ','
        << fmt(m.buffer_max_score) << ',' << fmt(m.buffer_mean_score) << ',' << fmt(m.share_ext) << ','
        << fmt(m.share_local) << ',' << fmt(m.share_global) << ',' << m.top_seed << ',' << fmt(m.top_seed_share)
        << ',' << m.distinct_states << '\n';
}

const char* episodes_header() noexcept {
    return "episode,end_frame,level_seed,length,return_ext,sum_int,g_ext,g_int,success,running_mean";
}

void write_episode_row(std::ostream& out, const EpisodeRecord& e) {
    out << e.index << ',' << e.end_frame << ',' << e.level_seed << ',' << e.length << ',' << fmt(e.return_ext) << ','
        << fmt(e.sum_int) << ',' << fmt(e.g_ext) << ',' << fmt(e.g_int) << ',' << (e.success ? 1 : 0) << ','
        << fmt(e.running_mean) << '\n';
}

Trainer::Trainer(const ExperimentConfig& cfg, std::uint64_t run_seed)
    : cfg_((validate(cfg), cfg)),
      run_seed_(run_seed),
      spec_(gridworld::parse_env_spec(cfg.env)),
      tracker_(effective_intrinsic(cfg)),
      action_rng_(run_seed, stream_id("action")),
      ppo_rng_(run_seed, stream_id("ppo")),
      offpolicy_rng_(run_seed, stream_id("offpolicy")),
      params_([&] {
          Rng init(run_seed, stream_id("init"));
          return agent::initialize(init);
      }()),
      adam_(agent::AdamConfig{cfg.ppo.lr}),
      collector_(spec_, cfg.level_seeds, tracker_, cfg.observation, Rng(run_seed, stream_id("level"))),
      scheduler_(cfg.schedule),
      ledger_(cfg.slot_frames) {
    if (uses_rapid(cfg_.method)) rapid_ = std::make_unique<rapid::RapidLearner>(cfg_.rapid);
    if (uses_sil(cfg_.method)) sil_ = std::make_unique<sil::SilBuffer>(cfg_.sil);
}

double Trainer::running_mean() const noexcept {
    return window_.empty() ? 0.0 : window_sum_ / static_cast<double>(window_.size());
}

void Trainer::on_episode(Episode&& ep) {
    if (observer_) observer_(ep);
    const double beta = tracker_.config().strategy == intrinsic::Strategy::None ? 0.0 : tracker_.config().beta;
    const auto g = ppo::discounted_returns_episode(ep, cfg_.ppo.gamma, beta);

    EpisodeRecord rec;
    rec.index = episodes_.size();
    rec.end_frame = ep.end_frame;
    rec.level_seed = ep.level_seed;
    rec.length = ep.length();
    rec.return_ext = ep.extrinsic_return();
    for (double r : ep.rewards_int) rec.sum_int += r;
    rec.g_ext = g.g_ext;
    rec.g_int = g.g_int;
    rec.success = ep.success;

    window_.push_back(rec.return_ext);
    if (window_.size() > cfg_.running_mean_window) window_.pop_front();
    // Summed afresh each time so the mean never accumulates rounding drift.
    window_sum_ = 0.0;
    for (double r : window_) window_sum_ += r;
    rec.running_mean = running_mean();

    if (rapid_) {
        pending_offpolicy_ += rapid_->score_and_schedule(ep, tracker_.table(), scheduler_, ledger_);
    } else if (sil_) {
        sil_->push_episode(ep);
        if (!sil_->empty()) pending_offpolicy_ += scheduler_.should_update_offpolicy(schedule::Event::EpisodeEnd, ledger_);
    }
    episodes_.push_back(rec);
    rollout_episodes_.push_back(rec);
}

const RolloutMetrics& Trainer::train_rollout() {
    if (finished()) throw UsageError("training run already reached total_frames");
    rollout_episodes_.clear();
    pending_offpolicy_ = 0;
    const int t = cfg_.ppo.rollout_steps;

    auto buffer = collector_.collect(params_, t, action_rng_, [this](Episode&& ep) { on_episode(std::move(ep)); });
    const auto gae = ppo::compute_gae(buffer, cfg_.ppo.gamma, cfg_.ppo.lambda);
    const auto stats = ppo::ppo_update(params_, adam_, buffer, gae, cfg_.ppo, ppo_rng_);
    ledger_.record_on_policy(1);

    // Episodes that ended inside the rollout were scored and stored as they finished;
    // their imitation updates run once the on-policy step has consumed the rollout.
    if (rapid_ || sil_) pending_offpolicy_ += scheduler_.should_update_offpolicy(schedule::Event::RolloutEnd, ledger_);
    double off_loss = 0.0;
    int off_done = 0;
    if (pending_offpolicy_ > 0) {
        if (rapid_ && !rapid_->buffer().empty()) {
            off_loss = rapid_->run_updates(pending_offpolicy_, params_, adam_, offpolicy_rng_);
            off_done = pending_offpolicy_;
        } else if (sil_ && !sil_->empty()) {
            for (int i = 0; i < pending_offpolicy_; ++i) off_loss += sil::sil_update(params_, adam_, *sil_, offpolicy_rng_).total;
            off_loss /= pending_offpolicy_;
            off_done = pending_offpolicy_;
        }
    }
    ledger_.record_off_policy(static_cast<std::uint64_t>(off_done));
    if (!params_.all_finite()) throw NumericError("policy parameters became non-finite");

    const std::uint64_t slot_before = frames_ / cfg_.slot_frames;
    frames_ += static_cast<std::uint64_t>(t);
    ledger_.advance_frames(static_cast<std::uint64_t>(t));
    ++rollouts_;
    if (rapid_ && (frames_ / cfg_.slot_frames != slot_before || finished())) snapshot_composition();

    RolloutMetrics row;
    row.rollout = rollouts_ - 1;
    row.frames = frames_;
    row.episodes = episodes_.size();
    row.episodes_in_rollout = rollout_episodes_.size();
    row.mean_return_rollout = kNaN;
    row.g_ext = kNaN;
    row.g_int = kNaN;
    if (!rollout_episodes_.empty()) {
        double r = 0, ge = 0, gi = 0;
        for (const auto& e : rollout_episodes_) {
            r += e.return_ext;
            ge += e.g_ext;
            gi += e.g_int;
        }
        const double n = static_cast<double>(rollout_episodes_.size());
        row.mean_return_rollout = r / n;
        row.g_ext = ge / n;
        row.g_int = gi / n;
    }
    row.running_mean = running_mean();
    row.policy_loss = stats.mean.policy;
    row.value_loss = stats.mean.value;
    row.entropy = stats.mean.entropy;
    row.mean_ratio = stats.mean.mean_ratio;
    row.clip_fraction = stats.mean.clip_fraction;
    row.offpolicy_updates = static_cast<std::uint64_t>(off_done);
    row.offpolicy_loss = off_loss;
    row.on_policy_total = ledger_.on_policy();
    row.off_policy_total = ledger_.off_policy();
    row.slot_xi_per_10 = ledger_.slots().empty() ? 0.0 : schedule::UpdateLedger::xi_per_10(ledger_.slots().back());
    row.distinct_states = tracker_.table().size();
    fill_buffer_stats(row);
    metrics_.push_back(row);
    return metrics_.back();
}

void Trainer::fill_buffer_stats(RolloutMetrics& row) const {
    if (rapid_) {
        const auto& buf = rapid_->buffer();
        row.buffer_size = buf.size();
        if (buf.empty()) return;
        row.buffer_min_score = buf.min_score();
        row.buffer_max_score = buf.max_score();
        const auto m = buf.component_means(rapid_->config().weights);
        row.buffer_mean_score = m.ext + m.local + m.global;
        if (row.buffer_mean_score > 0) {
            row.share_ext = m.ext / row.buffer_mean_score;
            row.share_local = m.local / row.buffer_mean_score;
            row.share_global = m.global / row.buffer_mean_score;
        }
        std::size_t best = 0;
        for (const auto& [seed, count] : buf.seed_histogram()) {
            if (count > best) {
                best = count;
                row.top_seed = seed;
            }
        }
        row.top_seed_share = static_cast<double>(best) / static_cast<double>(buf.size());
    } else if (sil_) {
        row.buffer_size = sil_->size();
    }
}

void Trainer::snapshot_composition() {
    CompositionSnapshot s;
    s.frame = frames_;
    s.total = rapid_->buffer().size();
    s.per_seed = rapid_->buffer().seed_histogram();
    composition_.push_back(std::move(s));
}

void Trainer::run(const std::function<void(const RolloutMetrics&)>& on_row) {
    while (!finished()) {
        const auto& row = train_rollout();
        if (on_row) on_row(row);
    }
}

agent::Checkpoint Trainer::checkpoint() const {
    agent::Checkpoint c;
    c.env_id = cfg_.env;
    c.frames = frames_;
    c.params = params_;
    c.optimizer = adam_;
    c.rng_streams = {{"action", action_rng_},
                     {"ppo", ppo_rng_},
                     {"offpolicy", offpolicy_rng_},
                     {"level", collector_.level_rng()}};
    return c;
}

std::uint64_t Trainer::state_fingerprint() const {
    std::uint64_t h = mix64(run_seed_);
    params_.visit([&](std::span<const double> s, bool) { h = hash_doubles(h, s); });
    adam_.first_moment().visit([&](std::span<const double> s, bool) { h = hash_doubles(h, s); });
    adam_.second_moment().visit([&](std::span<const double> s, bool) { h = hash_doubles(h, s); });
    h = combine64(h, tracker_.table().fingerprint());
    h = combine64(h, tracker_.table().total_visits());
    for (const Rng* r : {&action_rng_, &ppo_rng_, &offpolicy_rng_, &collector_.level_rng()})
        h = combine64(combine64(h, r->key()), r->counter());
    if (rapid_) {
        for (const auto& e : rapid_->buffer().experiences())
            h = combine64(combine64(h, e.episode_id), e.step);
    }
    if (sil_) {
        h = combine64(h, sil_->size());
        for (std::size_t i = 0; i < sil_->size(); ++i) h = hash_doubles(h, std::array<double, 1>{sil_->priority(i)});
    }
    return combine64(h, frames_);
}

namespace {

void write_error(const std::filesystem::path& dir, const RunSummary& s) {
    std::ofstream out(dir / "error.json");
    out << nlohmann::json{{"run_seed", s.run_seed},
                          {"kind", s.error_kind},
                          {"message", s.error},
                          {"frames", s.frames},
                          {"episodes", s.episodes}}
               .dump(2)
        << '\n';
}

void write_run_files(const Trainer& tr, const std::filesystem::path& dir) {
    {
        std::ofstream out(dir / "metrics.csv");
        out << metrics_header() << '\n';
        for (const auto& m : tr.metrics()) write_metrics_row(out, m);
    }
    {
        std::ofstream out(dir / "episodes.csv");
        out << episodes_header() << '\n';
        for (const auto& e : tr.episodes()) write_episode_row(out, e);
    }
    {
        std::ofstream out(dir / "slots.csv");
        out << "slot_start_frame,on_policy,off_policy,xi_per_10\n";
        for (const auto& s : tr.ledger().slots())
            out << s.start_frame << ',' << s.on_policy << ',' << s.off_policy << ','
                << fmt(schedule::UpdateLedger::xi_per_10(s)) << '\n';
    }
    if (tr.rapid()) {
        std::ofstream out(dir / "composition.csv");
        out << "frame,level_seed,experiences,share\n";
        for (const auto& c : tr.composition())
            for (const auto& [seed, n] : c.per_seed)
                out << c.frame << ',' << seed << ',' << n << ','
                    << fmt(static_cast<double>(n) / static_cast<double>(c.total)) << '\n';
    }
    const auto& cfg = tr.config();
    if (cfg.write_buffer_snapshot) {
        if (tr.rapid()) {
            std::ofstream out(dir / "buffer.csv");
            tr.rapid()->buffer().write_snapshot_csv(out);
        }
        if (tr.sil()) {
            std::ofstream out(dir / "sil_priorities.csv");
            tr.sil()->write_priority_histogram(out);
        }
    }
    if (cfg.write_checkpoint) agent::save_checkpoint(dir / "checkpoint.bin", tr.checkpoint());
}

}  // namespace

RunSummary run_single(const ExperimentConfig& cfg, std::uint64_t run_seed, const std::filesystem::path& dir) {
    RunSummary s;
    s.run_seed = run_seed;
    s.dir = dir;
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir / "error.json");
    Trainer tr(cfg, run_seed);
    std::ofstream timing(dir / "timing.csv");
    timing << "rollout,frames,wall_seconds\n";
    const auto start = std::chrono::steady_clock::now();
    try {
        tr.run([&](const RolloutMetrics& row) {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
            timing << row.rollout << ',' << row.frames << ',' << el.count() << '\n';
        });
    } catch (const NumericError& e) {
        s.ok = false;
        s.error_kind = "numeric";
        s.error = e.what();
    } catch (const InternalError& e) {
        s.ok = false;
        s.error_kind = "internal";
        s.error = e.what();
    }
    s.frames = tr.frames();
    s.episodes = tr.episodes().size();
    s.final_running_mean = tr.running_mean();
    write_run_files(tr, dir);
    if (!s.ok) write_error(dir, s);
    return s;
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::filesystem::path root(cfg.output_dir);
    std::filesystem::create_directories(root);
    {
        std::ofstream out(root / "config.json");
        out << to_json(cfg).dump(2) << '\n';
    }
    std::vector<RunSummary> results(cfg.run_seeds.size());
    std::vector<std::exception_ptr> failures(cfg.run_seeds.size());
    auto work = [&](std::size_t i) {
        try {
            const auto seed = cfg.run_seeds[i];
            results[i] = run_single(cfg, seed, root / ("run_" + std::to_string(seed)));
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    if (cfg.jobs <= 1) {
        for (std::size_t i = 0; i < results.size(); ++i) work(i);
    } else {
        std::mutex mu;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(cfg.jobs, results.size()); ++w) {
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i = 0;
                    {
                        std::lock_guard lock(mu);
                        if (next >= results.size()) return;
                        i = next++;
                    }
                    work(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : results) {
        runs.push_back({{"run_seed", r.run_seed},
                        {"ok", r.ok},
                        {"frames", r.frames},
                        {"episodes", r.episodes},
                        {"final_running_mean", r.final_running_mean},
                        {"dir", r.dir.string()}});
        if (!r.ok) runs.back()["error"] = {{"kind", r.error_kind}, {"message", r.error}};
    }
    std::ofstream out(root / "summary.json");
    out << nlohmann::json{{"env", cfg.env}, {"method", std::string(to_string(cfg.method))}, {"runs", runs}}.dump(2)
        << '\n';
    return results;
}

}  // namespace explab::harness
