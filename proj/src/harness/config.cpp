#include "explab/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "explab/errors.hpp"
#include "explab/gridworld/env_spec.hpp"

namespace explab::harness {

using nlohmann::json;

namespace {

constexpr std::pair<Method, std::string_view> kMethods[] = {
    {Method::Ppo, "ppo"},   {Method::PpoIm, "ppo+im"}, {Method::Rapid, "rapid"},
    {Method::RapidIm, "rapid+im"}, {Method::Sil, "sil"}, {Method::SilIm, "sil+im"},
};

/// Reads typed fields out of one JSON object and reports keys nobody asked for.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(where("") + " must be an object");
    }
    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + " has the wrong type");
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string where(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "config" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.contains(it.key())) throw ConfigError("unknown config key: " + where(it.key()));
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

std::string ratio_string(const schedule::RatioPolicy& p) {
    return std::to_string(p.on) + ":" + std::to_string(p.off);
}

void parse_ratio(const std::string& s, schedule::RatioPolicy& p) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("schedule.ratio must look like on:off, got " + s);
    try {
        std::size_t used = 0;
        p.on = std::stoi(s.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(s);
        const auto rest = s.substr(colon + 1);
        p.off = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
        throw ConfigError("schedule.ratio must look like on:off, got " + s);
    }
}

}  // namespace

Method parse_method(std::string_view s) {
    for (const auto& [m, name] : kMethods)
        if (name == s) return m;
    throw ConfigError("unknown method: " + std::string(s));
}

std::string_view to_string(Method m) noexcept {
    for (const auto& [k, name] : kMethods)
        if (k == m) return name;
    return "?";
}

bool uses_rapid(Method m) noexcept { return m == Method::Rapid || m == Method::RapidIm; }
bool uses_sil(Method m) noexcept { return m == Method::Sil || m == Method::SilIm; }
bool uses_intrinsic(Method m) noexcept { return m == Method::PpoIm || m == Method::RapidIm || m == Method::SilIm; }

intrinsic::IntrinsicConfig effective_intrinsic(const ExperimentConfig& cfg) {
    auto out = cfg.intrinsic;
    if (!uses_intrinsic(cfg.method)) out.strategy = intrinsic::Strategy::None;
    return out;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
    gridworld::parse_env_spec(cfg.env);
    intrinsic::validate(cfg.intrinsic);
    ppo::validate(cfg.ppo);
    rapid::validate(cfg.rapid);
    sil::validate(cfg.sil);
    schedule::validate(cfg.schedule);
    ppo::validate(cfg.level_seeds);
    if (cfg.total_frames == 0) throw ConfigError("total_frames must be positive");
    if (cfg.run_seeds.empty()) throw ConfigError("run_seeds must not be empty");
    if (std::set<std::uint64_t>(cfg.run_seeds.begin(), cfg.run_seeds.end()).size() != cfg.run_seeds.size())
        throw ConfigError("run_seeds must be distinct");
    if (cfg.slot_frames == 0) throw ConfigError("metrics.slot_frames must be positive");
    if (cfg.running_mean_window == 0) throw ConfigError("metrics.running_mean_window must be positive");
    if (cfg.output_dir.empty()) throw ConfigError("output.dir must not be empty");
    if (cfg.jobs == 0) throw ConfigError("jobs must be positive");
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig cfg;
    Reader top(doc, "");
    top.get("schema_version", cfg.schema_version);
    if (cfg.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
    top.get("env", cfg.env);
    std::string method(to_string(cfg.method));
    top.get("method", method);
    cfg.method = parse_method(method);
    top.get("total_frames", cfg.total_frames);
    top.get("run_seeds", cfg.run_seeds);
    top.get("jobs", cfg.jobs);

    if (const json* j = top.child("level_seeds")) {
        Reader r(*j, "level_seeds");
        std::string mode = "unbounded";
        r.get("mode", mode);
        if (mode == "unbounded") {
            cfg.level_seeds.kind = ppo::LevelSeedMode::Kind::Unbounded;
        } else if (mode == "fixed") {
            cfg.level_seeds.kind = ppo::LevelSeedMode::Kind::Fixed;
            r.get("seeds", cfg.level_seeds.seeds);
        } else if (mode == "range") {
            cfg.level_seeds.kind = ppo::LevelSeedMode::Kind::Range;
            r.get("begin", cfg.level_seeds.begin);
            r.get("end", cfg.level_seeds.end);
        } else {
            throw ConfigError("level_seeds.mode must be unbounded, fixed or range");
        }
        r.finish();
    }
    if (const json* j = top.child("intrinsic")) {
        Reader r(*j, "intrinsic");
        std::string strategy(intrinsic::to_string(cfg.intrinsic.strategy));
        std::string key(gridworld::to_string(cfg.intrinsic.key_mode));
        r.get("strategy", strategy);
        r.get("beta", cfg.intrinsic.beta);
        r.get("state_key", key);
        cfg.intrinsic.strategy = intrinsic::parse_strategy(strategy);
        cfg.intrinsic.key_mode = gridworld::parse_state_key_mode(key);
        r.finish();
    }
    if (const json* j = top.child("ppo")) {
        Reader r(*j, "ppo");
        auto& p = cfg.ppo;
        r.get("rollout_steps", p.rollout_steps);
        r.get("epochs", p.epochs);
        r.get("num_minibatches", p.num_minibatches);
        r.get("clip", p.clip);
        r.get("lr", p.lr);
        r.get("gamma", p.gamma);
        r.get("lambda", p.lambda);
        r.get("entropy_coef", p.entropy_coef);
        r.get("value_coef", p.value_coef);
        r.get("normalize_advantages", p.normalize_advantages);
        r.get("clip_value_loss", p.clip_value_loss);
        r.get("max_grad_norm", p.max_grad_norm);
        r.finish();
    }
    if (const json* j = top.child("rapid")) {
        Reader r(*j, "rapid");
        auto& p = cfg.rapid;
        r.get("capacity", p.capacity);
        r.get("batch_size", p.batch_size);
        r.get("w0", p.weights.ext);
        r.get("w1", p.weights.local);
        r.get("w2", p.weights.global);
        r.get("entropy_coef", p.entropy_coef);
        r.finish();
    }
    if (const json* j = top.child("sil")) {
        Reader r(*j, "sil");
        auto& p = cfg.sil;
        r.get("capacity", p.capacity);
        r.get("batch_size", p.batch_size);
        r.get("loss_weight", p.loss_weight);
        r.get("value_loss_weight", p.value_loss_weight);
        r.get("alpha", p.alpha);
        r.get("beta", p.beta);
        r.get("gamma", p.gamma);
        r.get("priority_eps", p.priority_eps);
        r.finish();
    }
    if (const json* j = top.child("schedule")) {
        Reader r(*j, "schedule");
        std::string mode(schedule::to_string(cfg.schedule.mode));
        std::string ratio = ratio_string(cfg.schedule);
        r.get("mode", mode);
        r.get("ratio", ratio);
        r.get("updates_per_trigger", cfg.schedule.updates_per_trigger);
        cfg.schedule.mode = schedule::parse_ratio_mode(mode);
        parse_ratio(ratio, cfg.schedule);
        r.finish();
    }
    if (const json* j = top.child("observation")) {
        Reader r(*j, "observation");
        r.get("occlusion", cfg.observation.occlusion);
        r.finish();
    }
    if (const json* j = top.child("metrics")) {
        Reader r(*j, "metrics");
        r.get("slot_frames", cfg.slot_frames);
        r.get("running_mean_window", cfg.running_mean_window);
        r.finish();
    }
    if (const json* j = top.child("output")) {
        Reader r(*j, "output");
        r.get("dir", cfg.output_dir);
        r.get("checkpoint", cfg.write_checkpoint);
        r.get("buffer_snapshot", cfg.write_buffer_snapshot);
        r.finish();
    }
    top.finish();
    validate(cfg);
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json level;
    switch (cfg.level_seeds.kind) {
        case ppo::LevelSeedMode::Kind::Unbounded: level = {{"mode", "unbounded"}}; break;
        case ppo::LevelSeedMode::Kind::Fixed: level = {{"mode", "fixed"}, {"seeds", cfg.level_seeds.seeds}}; break;
        case ppo::LevelSeedMode::Kind::Range:
            level = {{"mode", "range"}, {"begin", cfg.level_seeds.begin}, {"end", cfg.level_seeds.end}};
            break;
    }
    const auto& p = cfg.ppo;
    return json{
        {"schema_version", cfg.schema_version},
        {"env", cfg.env},
        {"method", std::string(to_string(cfg.method))},
        {"total_frames", cfg.total_frames},
        {"run_seeds", cfg.run_seeds},
        {"jobs", cfg.jobs},
        {"level_seeds", level},
        {"intrinsic",
         {{"strategy", std::string(intrinsic::to_string(cfg.intrinsic.strategy))},
          {"beta", cfg.intrinsic.beta},
          {"state_key", std::string(gridworld::to_string(cfg.intrinsic.key_mode))}}},
        {"ppo",
         {{"rollout_steps", p.rollout_steps},
          {"epochs", p.epochs},
          {"num_minibatches", p.num_minibatches},
          {"clip", p.clip},
          {"lr", p.lr},
          {"gamma", p.gamma},
          {"lambda", p.lambda},
          {"entropy_coef", p.entropy_coef},
          {"value_coef", p.value_coef},
          {"normalize_advantages", p.normalize_advantages},
          {"clip_value_loss", p.clip_value_loss},
          {"max_grad_norm", p.max_grad_norm}}},
        {"rapid",
         {{"capacity", cfg.rapid.capacity},
          {"batch_size", cfg.rapid.batch_size},
          {"w0", cfg.rapid.weights.ext},
          {"w1", cfg.rapid.weights.local},
          {"w2", cfg.rapid.weights.global},
          {"entropy_coef", cfg.rapid.entropy_coef}}},
        {"sil",
         {{"capacity", cfg.sil.capacity},
          {"batch_size", cfg.sil.batch_size},
          {"loss_weight", cfg.sil.loss_weight},
          {"value_loss_weight", cfg.sil.value_loss_weight},
          {"alpha", cfg.sil.alpha},
          {"beta", cfg.sil.beta},
          {"gamma", cfg.sil.gamma},
          {"priority_eps", cfg.sil.priority_eps}}},
        {"schedule",
         {{"mode", std::string(schedule::to_string(cfg.schedule.mode))},
          {"ratio", ratio_string(cfg.schedule)},
          {"updates_per_trigger", cfg.schedule.updates_per_trigger}}},
        {"observation", {{"occlusion", cfg.observation.occlusion}}},
        {"metrics", {{"slot_frames", cfg.slot_frames}, {"running_mean_window", cfg.running_mean_window}}},
        {"output",
         {{"dir", cfg.output_dir},
          {"checkpoint", cfg.write_checkpoint},
          {"buffer_snapshot", cfg.write_buffer_snapshot}}},
    };
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("override must look like key=value: " + std::string(assignment));
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("malformed override key: " + key);
        if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + key);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    for (const auto& o : overrides) apply_override(doc, o);
    return config_from_json(doc);
}

}  // namespace explab::harness
