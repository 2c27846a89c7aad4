#include "explab/schedule/table_ratios.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "explab/errors.hpp"

namespace explab::schedule {

namespace {

constexpr int kReferenceRollout = 128;

struct PublishedRow {
    const char* label;
    const char* env_id;
    int optimum_steps;
    RatioPair t128_initial;
    RatioPair t128_final;
    RatioPair t2048_initial;
    RatioPair t2048_final;
};

constexpr PublishedRow kPublished[] = {
    {"MN7S8", "MultiRoom-N7-S8", 50, {1, 1}, {1, 3}, {1, 14}, {1, 40}},
    {"MN12S10", "MultiRoom-N12-S10", 105, {2, 1}, {2, 2}, {2, 17}, {2, 40}},
    {"KS4R3", "KeyCorridor-S4-R3", 37, {4, 1}, {4, 13}, {4, 17}, {4, 216}},
    {"O2Dlh", "ObstructedMaze-2Dlh", 32, {5, 1}, {5, 18}, {5, 18}, {5, 320}},
};

}  // namespace

RatioPair expected_ratio(const gridworld::EnvSpec& spec, int rollout_steps, int episode_len) {
    if (rollout_steps <= 0) throw ConfigError("rollout size must be positive");
    if (episode_len < 1 || episode_len > spec.max_steps)
        throw ConfigError("episode length must lie in [1, max_steps]");
    const double max_steps = spec.max_steps;
    const int on = std::max(1, static_cast<int>(std::lround(max_steps / kReferenceRollout)));
    int off = 0;
    if (rollout_steps <= spec.max_steps) {
        off = static_cast<int>(std::lround(max_steps / episode_len));
    } else {
        off = static_cast<int>((static_cast<long long>(on) * rollout_steps) / episode_len);
    }
    return {on, off};
}

std::vector<RatioCell> reproduce_ratio_table() {
    std::vector<RatioCell> cells;
    for (const auto& row : kPublished) {
        const auto spec = gridworld::parse_env_spec(row.env_id);
        const struct {
            int t;
            const char* phase;
            RatioPair published;
        } variants[] = {{128, "Initial", row.t128_initial},
                        {128, "Final", row.t128_final},
                        {2048, "Initial", row.t2048_initial},
                        {2048, "Final", row.t2048_final}};
        for (const auto& v : variants) {
            RatioCell c;
            c.env_label = row.label;
            c.max_steps = spec.max_steps;
            c.optimum_steps = row.optimum_steps;
            c.rollout_steps = v.t;
            c.phase = v.phase;
            c.published = v.published;
            const int len = std::string_view(v.phase) == "Initial" ? spec.max_steps : row.optimum_steps;
            c.computed = expected_ratio(spec, v.t, len);
            c.matched = c.computed == c.published;
            cells.push_back(c);
        }
    }
    return cells;
}

void write_ratio_table_text(std::ostream& out, const std::vector<RatioCell>& cells) {
    out << std::left << std::setw(9) << "env" << std::setw(7) << "T" << std::setw(9) << "phase" << std::setw(11)
        << "max_steps" << std::setw(9) << "optimum" << std::setw(11) << "published" << std::setw(10) << "computed"
        << "status\n";
    std::size_t matched = 0;
    for (const auto& c : cells) {
        const std::string pub = std::to_string(c.published.on) + ":" + std::to_string(c.published.off);
        const std::string got = std::to_string(c.computed.on) + ":" + std::to_string(c.computed.off);
        out << std::left << std::setw(9) << c.env_label << std::setw(7) << c.rollout_steps << std::setw(9) << c.phase
            << std::setw(11) << c.max_steps << std::setw(9) << c.optimum_steps << std::setw(11) << pub
            << std::setw(10) << got << (c.matched ? "match" : "FLAGGED (convention mismatch)") << '\n';
        if (c.matched) ++matched;
    }
    out << "matched " << matched << " of " << cells.size() << " cells\n";
}

void write_ratio_table_csv(std::ostream& out, const std::vector<RatioCell>& cells) {
    out << "env,rollout_steps,phase,max_steps,optimum_steps,published_on,published_off,computed_on,computed_off,"
           "matched\n";
    for (const auto& c : cells) {
        out << c.env_label << ',' << c.rollout_steps << ',' << c.phase << ',' << c.max_steps << ','
            << c.optimum_steps << ',' << c.published.on << ',' << c.published.off << ',' << c.computed.on << ','
            << c.computed.off << ',' << (c.matched ? 1 : 0) << '\n';
    }
}

}  // namespace explab::schedule
