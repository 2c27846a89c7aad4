#include "explab/sil/sum_tree.hpp"

#include <cmath>

#include "explab/errors.hpp"

namespace explab::sil {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity), base_(1) {
    if (capacity_ == 0) throw ConfigError("sum tree capacity must be positive");
    while (base_ < capacity_) base_ <<= 1;
    nodes_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t index, double value) {
    if (index >= capacity_) throw UsageError("sum tree index out of range");
    if (!(value >= 0.0) || !std::isfinite(value)) throw UsageError("sum tree values must be finite and non-negative");
    std::size_t node = base_ + index;
    nodes_[node] = value;
    // Recompute parents from children instead of adding a delta, so rounding never drifts.
    for (node >>= 1; node >= 1; node >>= 1) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

double SumTree::get(std::size_t index) const {
    if (index >= capacity_) throw UsageError("sum tree index out of range");
    return nodes_[base_ + index];
}

std::size_t SumTree::find(double mass) const {
    if (total() <= 0.0) throw UsageError("cannot sample from an empty sum tree");
    std::size_t node = 1;
    while (node < base_) {
        const std::size_t left = 2 * node;
        if (mass < nodes_[left] || nodes_[left + 1] <= 0.0) {
            node = left;
        } else {
            mass -= nodes_[left];
            node = left + 1;
        }
    }
    std::size_t index = node - base_;
    // Floating point can walk into a zero leaf at the far right; step back to a live one.
    while (index > 0 && nodes_[base_ + index] <= 0.0) --index;
    return index;
}

double SumTree::leaf_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < capacity_; ++i) s += nodes_[base_ + i];
    return s;
}

}  // namespace explab::sil
