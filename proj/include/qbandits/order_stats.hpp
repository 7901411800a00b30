#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qbandits/distributions.hpp"

namespace qbandits {

// Rank k in {1, ..., n}, decreasing-order convention (k = 1 is the maximum).
struct Rank {
    std::int64_t k;
    std::int64_t n;
    Rank(std::int64_t k_, std::int64_t n_);
};

// k = floor(n (1 - tau)). Throws "rank underflow" when the floor is 0; the
// concentration bounds require k >= 1 and clamping would corrupt them.
Rank rank_for(std::int64_t n, QuantileLevel tau);

// Sample held sorted in non-increasing order: values[0] >= values[1] >= ...
class SortedSample {
public:
    explicit SortedSample(std::vector<double> raw);

    std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
    const std::vector<double>& values() const { return values_; }

    // The k-th largest value, k in {1, ..., n}.
    double order_statistic(std::int64_t k) const;

    // S_k = X_(k) - X_(k+1), k in {1, ..., n-1}.
    double spacing(std::int64_t k) const;

private:
    std::vector<double> values_;
};

// Order statistic of the raw sample at rank floor(n(1-tau)).
double empirical_quantile(std::span<const double> raw, QuantileLevel tau);
double empirical_quantile(const SortedSample& sample, QuantileLevel tau);

} // namespace qbandits
