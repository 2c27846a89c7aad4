#include "explab/intrinsic/count_table.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <vector>

#include "explab/rng.hpp"

namespace explab::intrinsic {

KeyDigest digest(std::string_view key) noexcept { return std::hash<std::string_view>{}(key); }

std::uint64_t CountTable::record_visit(KeyDigest key) {
    ++total_;
    return ++counts_[key];
}

std::uint64_t CountTable::count(KeyDigest key) const noexcept {
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
}

void CountTable::write_csv(std::ostream& out) const {
    std::vector<std::pair<KeyDigest, std::uint64_t>> rows(counts_.begin(), counts_.end());
    std::sort(rows.begin(), rows.end());
    out << "key_hash,count\n";
    for (const auto& [k, n] : rows) out << k << ',' << n << '\n';
}

std::uint64_t CountTable::fingerprint() const noexcept {
    std::uint64_t acc = mix64(total_);
    for (const auto& [k, n] : counts_) acc += combine64(k, n);
    return acc;
}

}  // namespace explab::intrinsic
