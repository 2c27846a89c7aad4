#include "explab/rapid/rapid.hpp"

#include <cmath>
#include <string>

#include "explab/errors.hpp"

namespace explab::rapid {

void validate(const RapidConfig& cfg) {
    if (cfg.capacity == 0) throw ConfigError("rapid.capacity must be positive");
    if (cfg.batch_size == 0) throw ConfigError("rapid.batch_size must be positive");
    if (cfg.entropy_coef < 0) throw ConfigError("rapid.entropy_coef must be non-negative");
}

double bc_loss(const agent::PolicyParams& params, const agent::Matrix& inputs, const std::vector<int>& actions,
               double entropy_coef, agent::Gradients* grads) {
    const auto n = inputs.cols();
    if (n == 0 || static_cast<std::size_t>(n) != actions.size()) throw UsageError("bad imitation batch");
    const auto cache = agent::forward(params, inputs, agent::Heads::ActorOnly);
    agent::Matrix dlogits(agent::kNumActions, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    double nll = 0.0;
    double ent = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const agent::Vector logp = agent::log_softmax(cache.logits.col(i));
        const agent::Vector p = logp.array().exp();
        const int a = actions[static_cast<std::size_t>(i)];
        nll -= logp(a);
        const double h = -(p.array() * logp.array()).sum();
        ent += h;
        // d(-log p_a)/dz = p - onehot(a); d(-H)/dz_j = p_j (log p_j + H)
        for (int j = 0; j < agent::kNumActions; ++j) {
            double d = p(j) - (j == a ? 1.0 : 0.0);
            d += entropy_coef * p(j) * (logp(j) + h);
            dlogits(j, i) = d * inv_n;
        }
    }
    if (grads) *grads = agent::backward(params, cache, dlogits, agent::RowVector());
    return (nll - entropy_coef * ent) * inv_n;
}

double bc_update(agent::PolicyParams& params, agent::Adam& adam, const RankedBuffer::Batch& batch,
                 double entropy_coef) {
    agent::Gradients g;
    const double loss = bc_loss(params, batch.inputs, batch.actions, entropy_coef, &g);
    if (!std::isfinite(loss)) throw NumericError("imitation loss is not finite: " + std::to_string(loss));
    adam.step(params, g);
    return loss;
}

RapidLearner::RapidLearner(RapidConfig config) : config_(config), buffer_(config.capacity) { validate(config_); }

int RapidLearner::score_and_schedule(const Episode& episode, const intrinsic::CountTable& counts,
                                     schedule::OffPolicyScheduler& scheduler, const schedule::UpdateLedger& ledger) {
    last_insert_ = buffer_.insert(score_episode(episode, counts, config_.weights));
    const int n = scheduler.should_update_offpolicy(schedule::Event::EpisodeEnd, ledger);
    return buffer_.empty() ? 0 : n;
}

int RapidLearner::on_episode_end(const Episode& episode, const intrinsic::CountTable& counts,
                                 schedule::OffPolicyScheduler& scheduler, schedule::UpdateLedger& ledger,
                                 agent::PolicyParams& params, agent::Adam& adam, Rng& rng) {
    const int n = score_and_schedule(episode, counts, scheduler, ledger);
    run_updates(n, params, adam, rng);
    ledger.record_off_policy(static_cast<std::uint64_t>(n));
    return n;
}

double RapidLearner::run_updates(int n, agent::PolicyParams& params, agent::Adam& adam, Rng& rng) {
    if (n <= 0 || buffer_.empty()) return 0.0;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto batch = buffer_.sample_batch(config_.batch_size, rng);
        total += bc_update(params, adam, batch, config_.entropy_coef);
    }
    updates_run_ += static_cast<std::uint64_t>(n);
    return total / n;
}

}  // namespace explab::rapid
