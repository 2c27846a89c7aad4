#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "explab/harness/trainer.hpp"

namespace explab::harness {

/// Fraction of ranked-buffer experiences per level seed over time.
struct CompositionPoint {
    std::uint64_t frame = 0;
    std::map<std::uint64_t, double> shares;
    std::uint64_t top_seed = 0;
    double top_share = 0.0;
};
using CompositionReport = std::vector<CompositionPoint>;

/// Snapshots with an empty buffer are dropped, so a fresh buffer gives an empty report.
CompositionReport buffer_composition_report(const std::vector<CompositionSnapshot>& snapshots);
/// Same, read back from a run directory's composition.csv.
CompositionReport buffer_composition_report(const std::filesystem::path& run_dir);

/// frame,top_seed,top_share,num_seeds
void write_composition_report(std::ostream& out, const CompositionReport& report);

}  // namespace explab::harness
