#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace explab::intrinsic {

/// Fixed-width identity of a state key. Keys are digested because full-state keys of
/// procedurally generated levels are ~2 KB each and a run visits millions of them.
using KeyDigest = std::uint64_t;
KeyDigest digest(std::string_view key) noexcept;

/// Run-wide visit counts N(s). Counts only grow; the table is never reset between episodes.
class CountTable {
public:
    /// Increments N(key) and returns the new count.
    std::uint64_t record_visit(KeyDigest key);
    std::uint64_t record_visit(std::string_view key) { return record_visit(digest(key)); }

    /// N(key), 0 for keys never visited.
    std::uint64_t count(KeyDigest key) const noexcept;
    std::uint64_t count(std::string_view key) const noexcept { return count(digest(key)); }

    std::size_t size() const noexcept { return counts_.size(); }
    std::uint64_t total_visits() const noexcept { return total_; }

    /// "key_hash,count" rows sorted by key hash.
    void write_csv(std::ostream& out) const;

    /// Order-independent fingerprint of the whole table.
    std::uint64_t fingerprint() const noexcept;

    const std::unordered_map<KeyDigest, std::uint64_t>& entries() const noexcept { return counts_; }

private:
    std::unordered_map<KeyDigest, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// States already seen in the current episode.
class EpisodeVisitSet {
public:
    bool contains(KeyDigest key) const noexcept { return seen_.contains(key); }
    /// Returns true if the key was new to this episode.
    bool insert(KeyDigest key) { return seen_.insert(key).second; }
    void clear() noexcept { seen_.clear(); }
    std::size_t size() const noexcept { return seen_.size(); }

private:
    std::unordered_set<KeyDigest> seen_;
};

}  // namespace explab::intrinsic
