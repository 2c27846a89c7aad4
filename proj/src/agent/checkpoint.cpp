#include "explab/agent/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "explab/errors.hpp"

namespace explab::agent {

namespace {

constexpr char kMagic[8] = {'E', 'X', 'L', 'B', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian hosts");

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot write checkpoint: " + path.string());
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void i64(std::int64_t v) { bytes(&v, sizeof v); }
    void f64(double v) { bytes(&v, sizeof v); }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void params(const PolicyParams& p) {
        p.visit([&](std::span<const double> s, bool) {
            u64(s.size());
            bytes(s.data(), s.size() * sizeof(double));
        });
    }
    bool ok() const { return static_cast<bool>(out_); }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path.string()) {
        if (!in_) throw ConfigError("cannot open checkpoint: " + path_);
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw ConfigError("truncated checkpoint: " + path_);
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, sizeof v);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        bytes(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, sizeof v);
        return v;
    }
    std::string str() {
        const auto n = u64();
        if (n > (1u << 20)) throw ConfigError("corrupt checkpoint string: " + path_);
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    PolicyParams params() {
        PolicyParams p = PolicyParams::zeros();
        p.visit([&](std::span<double> s, bool) {
            if (u64() != s.size()) throw ConfigError("checkpoint parameter shape mismatch: " + path_);
            bytes(s.data(), s.size() * sizeof(double));
        });
        return p;
    }

private:
    std::ifstream in_;
    std::string path_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    Writer w(path);
    w.bytes(kMagic, sizeof kMagic);
    w.u64(kVersion);
    w.str(c.env_id);
    w.u64(c.frames);
    w.params(c.params);
    const auto& cfg = c.optimizer.config();
    w.f64(cfg.lr);
    w.f64(cfg.beta1);
    w.f64(cfg.beta2);
    w.f64(cfg.eps);
    w.i64(c.optimizer.actor_steps());
    w.i64(c.optimizer.critic_steps());
    w.params(c.optimizer.first_moment());
    w.params(c.optimizer.second_moment());
    w.u64(c.rng_streams.size());
    for (const auto& [name, rng] : c.rng_streams) {
        w.str(name);
        w.u64(rng.key());
        w.u64(rng.counter());
    }
    if (!w.ok()) throw ConfigError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw ConfigError("not a checkpoint file: " + path.string());
    if (const auto v = r.u64(); v != kVersion)
        throw ConfigError("unsupported checkpoint version " + std::to_string(v));
    Checkpoint c;
    c.env_id = r.str();
    c.frames = r.u64();
    c.params = r.params();
    AdamConfig cfg;
    cfg.lr = r.f64();
    cfg.beta1 = r.f64();
    cfg.beta2 = r.f64();
    cfg.eps = r.f64();
    const auto actor_steps = r.i64();
    const auto critic_steps = r.i64();
    auto m = r.params();
    auto v = r.params();
    c.optimizer = Adam(cfg);
    c.optimizer.restore(std::move(m), std::move(v), actor_steps, critic_steps);
    const auto n = r.u64();
    if (n > 1024) throw ConfigError("corrupt checkpoint stream table: " + path.string());
    for (std::uint64_t i = 0; i < n; ++i) {
        auto name = r.str();
        const auto key = r.u64();
        const auto counter = r.u64();
        c.rng_streams.emplace_back(std::move(name), Rng::from_state(key, counter));
    }
    return c;
}

}  // namespace explab::agent
