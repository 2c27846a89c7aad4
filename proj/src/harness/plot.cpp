#include "explab/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "explab/errors.hpp"

namespace explab::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s) {
    if (s.empty() || s == "nan") return kNaN;
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw ConfigError("not a number in metrics file: " + s);
    }
}

bool wildcard_match(const char* pat, const char* str) {
    if (*pat == '\0') return *str == '\0';
    if (*pat == '*') return wildcard_match(pat + 1, str) || (*str != '\0' && wildcard_match(pat, str + 1));
    if (*str == '\0') return false;
    return (*pat == '?' || *pat == *str) && wildcard_match(pat + 1, str + 1);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    if (std::abs(v) >= 1e6)
        std::snprintf(buf, sizeof buf, "%.3gM", v / 1e6);
    else if (std::abs(v) >= 1e3)
        std::snprintf(buf, sizeof buf, "%.3gk", v / 1e3);
    else
        std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

}  // namespace

RunCurve read_run_curve(const fs::path& metrics_csv, const std::string& column) {
    std::ifstream in(metrics_csv);
    if (!in) throw ConfigError("cannot open metrics file: " + metrics_csv.string());
    const fs::path config_path = metrics_csv.parent_path().parent_path() / "config.json";
    std::ifstream cin(config_path);
    if (!cin) throw ConfigError("missing experiment config next to run: " + config_path.string());
    const auto cfg = nlohmann::json::parse(cin, nullptr, false);
    if (cfg.is_discarded() || !cfg.contains("env") || !cfg.contains("method"))
        throw ConfigError("experiment config lacks env/method: " + config_path.string());

    RunCurve curve;
    curve.env = cfg["env"].get<std::string>();
    curve.method = cfg["method"].get<std::string>();
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty metrics file: " + metrics_csv.string());
    const auto header = split_csv_line(line);
    const auto find_col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError("metrics file has no column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t fcol = find_col("frames");
    const std::size_t vcol = find_col(column);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw ConfigError("ragged row in " + metrics_csv.string());
        curve.frames.push_back(parse_number(cells[fcol]));
        curve.values.push_back(parse_number(cells[vcol]));
    }
    return curve;
}

std::vector<SeriesStats> aggregate_curves(const std::vector<RunCurve>& runs) {
    std::map<std::pair<std::string, std::string>, std::vector<const RunCurve*>> groups;
    for (const auto& r : runs) groups[{r.env, r.method}].push_back(&r);

    std::vector<SeriesStats> out;
    for (const auto& [key, members] : groups) {
        SeriesStats s;
        s.env = key.first;
        s.method = key.second;
        s.runs = members.size();
        double horizon = std::numeric_limits<double>::infinity();
        for (const auto* r : members) horizon = std::min(horizon, r->frames.empty() ? -1.0 : r->frames.back());
        for (double f : members.front()->frames)
            if (f <= horizon) s.frames.push_back(f);

        std::vector<std::size_t> cursor(members.size(), 0);
        for (double f : s.frames) {
            std::vector<double> vals;
            for (std::size_t k = 0; k < members.size(); ++k) {
                const auto* r = members[k];
                auto& c = cursor[k];
                while (c < r->frames.size() && r->frames[c] <= f) ++c;
                if (c == 0) continue;
                const double v = r->values[c - 1];
                if (std::isfinite(v)) vals.push_back(v);
            }
            if (vals.empty()) {
                s.mean.push_back(kNaN);
                s.std.push_back(kNaN);
                continue;
            }
            double m = 0.0;
            for (double v : vals) m += v;
            m /= static_cast<double>(vals.size());
            double var = 0.0;
            for (double v : vals) var += (v - m) * (v - m);
            s.mean.push_back(m);
            s.std.push_back(std::sqrt(var / static_cast<double>(vals.size())));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string render_svg(const std::vector<SeriesStats>& series, const std::string& y_label) {
    std::vector<std::string> envs;
    std::vector<std::string> methods;
    for (const auto& s : series) {
        if (std::find(envs.begin(), envs.end(), s.env) == envs.end()) envs.push_back(s.env);
        if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) methods.push_back(s.method);
    }
    const double pw = 360, ph = 260, ml = 56, mr = 16, mt = 34, mb = 44;
    const double legend_h = 24.0 * static_cast<double>(methods.size() > 0 ? 1 : 0);
    const double width = pw * static_cast<double>(std::max<std::size_t>(envs.size(), 1));
    const double height = ph + legend_h + 8;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t e = 0; e < envs.size(); ++e) {
        const double x0 = pw * static_cast<double>(e);
        double fmax = 0.0, ymin = 0.0, ymax = 1.0;
        for (const auto& s : series) {
            if (s.env != envs[e]) continue;
            for (std::size_t i = 0; i < s.frames.size(); ++i) {
                fmax = std::max(fmax, s.frames[i]);
                if (!std::isfinite(s.mean[i])) continue;
                ymin = std::min(ymin, s.mean[i] - s.std[i]);
                ymax = std::max(ymax, s.mean[i] + s.std[i]);
            }
        }
        if (fmax <= 0) fmax = 1;
        const double ax = x0 + ml, aw = pw - ml - mr, ay = mt, ah = ph - mt - mb;
        const auto px = [&](double f) { return ax + aw * f / fmax; };
        const auto py = [&](double v) { return ay + ah * (1.0 - (v - ymin) / (ymax - ymin)); };

        svg << "<text x=\"" << num(ax + aw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << envs[e]
            << "</text>\n";
        svg << "<rect x=\"" << num(ax) << "\" y=\"" << num(ay) << "\" width=\"" << num(aw) << "\" height=\""
            << num(ah) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double f = fmax * k / 4.0;
            const double v = ymin + (ymax - ymin) * k / 4.0;
            svg << "<text x=\"" << num(px(f)) << "\" y=\"" << num(ay + ah + 14) << "\" text-anchor=\"middle\">"
                << tick_label(f) << "</text>\n";
            svg << "<text x=\"" << num(ax - 4) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">"
                << tick_label(v) << "</text>\n";
            svg << "<line x1=\"" << num(ax) << "\" x2=\"" << num(ax + aw) << "\" y1=\"" << num(py(v)) << "\" y2=\""
                << num(py(v)) << "\" stroke=\"#ddd\"/>\n";
        }
        svg << "<text x=\"" << num(ax + aw / 2) << "\" y=\"" << num(ay + ah + 32)
            << "\" text-anchor=\"middle\">frames</text>\n";
        svg << "<text transform=\"translate(" << num(x0 + 14) << "," << num(ay + ah / 2)
            << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";

        for (const auto& s : series) {
            if (s.env != envs[e]) continue;
            const auto mi = static_cast<std::size_t>(std::find(methods.begin(), methods.end(), s.method) - methods.begin());
            const char* color = kPalette[mi % std::size(kPalette)];
            std::ostringstream upper, lower, line;
            std::vector<std::pair<double, double>> lows;
            for (std::size_t i = 0; i < s.frames.size(); ++i) {
                if (!std::isfinite(s.mean[i])) continue;
                upper << num(px(s.frames[i])) << ',' << num(py(s.mean[i] + s.std[i])) << ' ';
                lows.emplace_back(px(s.frames[i]), py(s.mean[i] - s.std[i]));
                line << num(px(s.frames[i])) << ',' << num(py(s.mean[i])) << ' ';
            }
            for (auto it = lows.rbegin(); it != lows.rend(); ++it) lower << num(it->first) << ',' << num(it->second) << ' ';
            svg << "<polygon points=\"" << upper.str() << lower.str() << "\" fill=\"" << color
                << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
            svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
        }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const double lx = 12 + 110.0 * static_cast<double>(m), ly = ph + 10;
        svg << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" width=\"14\" height=\"4\" fill=\""
            << kPalette[m % std::size(kPalette)] << "\"/>\n";
        svg << "<text x=\"" << num(lx + 18) << "\" y=\"" << num(ly + 6) << "\">" << methods[m] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_aggregate_csv(std::ostream& out, const std::vector<SeriesStats>& series) {
    out << "env,method,runs,frames,mean,std\n";
    char buf[64];
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.frames.size(); ++i) {
            out << s.env << ',' << s.method << ',' << s.runs << ',';
            std::snprintf(buf, sizeof buf, "%.0f,%.17g,%.17g\n", s.frames[i], s.mean[i], s.std[i]);
            out << buf;
        }
    }
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
    const fs::path pat(pattern);
    std::vector<fs::path> current{pat.is_absolute() ? pat.root_path() : fs::path(".")};
    bool first = true;
    for (const auto& part : pat.relative_path()) {
        const std::string p = part.string();
        std::vector<fs::path> next;
        const bool wild = p.find_first_of("*?") != std::string::npos;
        for (const auto& base : current) {
            if (!wild) {
                const fs::path cand = (first && !pat.is_absolute()) ? fs::path(p) : base / p;
                if (fs::exists(cand)) next.push_back(cand);
                continue;
            }
            const fs::path dir = (first && !pat.is_absolute()) ? fs::path(".") : base;
            if (!fs::is_directory(dir)) continue;
            for (const auto& entry : fs::directory_iterator(dir)) {
                const std::string name = entry.path().filename().string();
                if (wildcard_match(p.c_str(), name.c_str()))
                    next.push_back((first && !pat.is_absolute()) ? fs::path(name) : base / name);
            }
        }
        current = std::move(next);
        first = false;
    }
    std::sort(current.begin(), current.end());
    return current;
}

}  // namespace explab::harness
