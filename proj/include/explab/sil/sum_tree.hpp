#pragma once

#include <cstddef>
#include <vector>

namespace explab::sil {

/// Binary sum tree over a fixed number of non-negative leaves.
class SumTree {
public:
    explicit SumTree(std::size_t capacity);

    void set(std::size_t index, double value);
    double get(std::size_t index) const;
    double total() const noexcept { return nodes_[1]; }
    std::size_t capacity() const noexcept { return capacity_; }

    /// Smallest leaf index i with leaf[0] + ... + leaf[i] > mass. `mass` must lie in [0, total()).
    /// Values at or beyond the total are clamped to the last non-zero leaf.
    std::size_t find(double mass) const;

    /// Sum of leaves recomputed from scratch (for consistency checks).
    double leaf_sum() const;

private:
    std::size_t capacity_;
    std::size_t base_;  // first leaf node
    std::vector<double> nodes_;
};

}  // namespace explab::sil
