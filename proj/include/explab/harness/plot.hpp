#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace explab::harness {

/// One metrics column of one run.
struct RunCurve {
    std::string env;
    std::string method;
    std::vector<double> frames;
    std::vector<double> values;
};

/// Reads `column` from a run's metrics.csv; env and method come from the config.json of the
/// experiment directory one level up. Throws ConfigError on missing files or columns.
RunCurve read_run_curve(const std::filesystem::path& metrics_csv, const std::string& column = "running_mean");

/// Mean and population standard deviation across the runs of one (env, method) pair.
struct SeriesStats {
    std::string env;
    std::string method;
    std::size_t runs = 0;
    std::vector<double> frames;
    std::vector<double> mean;
    std::vector<double> std;
};

/// Groups runs by (env, method). Each group is evaluated on its first run's frame grid, up to the
/// shortest run; a run contributes its latest value at or before each grid frame. NaN values are
/// skipped, and a point with no finite contribution is NaN.
std::vector<SeriesStats> aggregate_curves(const std::vector<RunCurve>& runs);

/// One panel per env, one coloured series per method: mean line over a +-1 std band.
std::string render_svg(const std::vector<SeriesStats>& series, const std::string& y_label);

/// env,method,runs,frames,mean,std
void write_aggregate_csv(std::ostream& out, const std::vector<SeriesStats>& series);

/// Files matching a pattern whose last path components may contain '*' and '?', e.g.
/// "runs/*/run_*/metrics.csv". Sorted for stable output.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace explab::harness
