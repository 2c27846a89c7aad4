#include "explab/harness/composition.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "explab/errors.hpp"

namespace explab::harness {

namespace {

void finish_point(CompositionPoint& p) {
    for (const auto& [seed, share] : p.shares) {
        if (share > p.top_share) {
            p.top_share = share;
            p.top_seed = seed;
        }
    }
}

}  // namespace

CompositionReport buffer_composition_report(const std::vector<CompositionSnapshot>& snapshots) {
    CompositionReport report;
    for (const auto& s : snapshots) {
        if (s.total == 0) continue;
        CompositionPoint p;
        p.frame = s.frame;
        for (const auto& [seed, n] : s.per_seed) p.shares[seed] = static_cast<double>(n) / static_cast<double>(s.total);
        finish_point(p);
        report.push_back(std::move(p));
    }
    return report;
}

CompositionReport buffer_composition_report(const std::filesystem::path& run_dir) {
    const auto path = run_dir / "composition.csv";
    std::ifstream in(path);
    if (!in) throw ConfigError("no composition.csv in " + run_dir.string());
    std::string line;
    std::getline(in, line);
    if (line != "frame,level_seed,experiences,share") throw ConfigError("unexpected composition.csv header");
    std::vector<CompositionSnapshot> snaps;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string frame, seed, count, share;
        if (!std::getline(row, frame, ',') || !std::getline(row, seed, ',') || !std::getline(row, count, ','))
            throw ConfigError("malformed composition.csv row: " + line);
        const std::uint64_t f = std::stoull(frame);
        if (snaps.empty() || snaps.back().frame != f) snaps.push_back({f, 0, {}});
        const std::size_t n = std::stoull(count);
        snaps.back().per_seed[std::stoull(seed)] = n;
        snaps.back().total += n;
    }
    return buffer_composition_report(snaps);
}

void write_composition_report(std::ostream& out, const CompositionReport& report) {
    out << "frame,top_seed,top_share,num_seeds\n";
    for (const auto& p : report)
        out << p.frame << ',' << p.top_seed << ',' << p.top_share << ',' << p.shares.size() << '\n';
}

}  // namespace explab::harness
