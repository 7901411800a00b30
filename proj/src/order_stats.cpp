#include "qbandits/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace qbandits {

Rank::Rank(std::int64_t k_, std::int64_t n_) : k(k_), n(n_) {
    if (n < 1) throw std::invalid_argument("rank: n must be >= 1");
    if (k < 1 || k > n) throw std::out_of_range("rank: k must be in [1, n]");
}

Rank rank_for(std::int64_t n, QuantileLevel tau) {
    if (n < 1) throw std::invalid_argument("rank_for: n must be >= 1");
    const double x = static_cast<double>(n) * (1.0 - tau.tau);
    double f = std::floor(x);
    // floor(n(1-tau)) is meant in exact arithmetic; snap up when the double
    // product lands a hair below an integer (e.g. 10 * (1 - 0.8)).
    if (x - f > 1.0 - 1e-9) f += 1.0;
    const auto k = static_cast<std::int64_t>(f);
    if (k < 1) throw std::domain_error("rank underflow: floor(n(1-tau)) = 0");
    return Rank(std::min(k, n), n);
}

SortedSample::SortedSample(std::vector<double> raw) : values_(std::move(raw)) {
    if (values_.empty()) throw std::invalid_argument("sorted sample must be non-empty");
    std::sort(values_.begin(), values_.end(), std::greater<>());
}

double SortedSample::order_statistic(std::int64_t k) const {
    if (k < 1 || k > size()) throw std::out_of_range("order_statistic: k must be in [1, n]");
    return values_[static_cast<std::size_t>(k - 1)];
}

double SortedSample::spacing(std::int64_t k) const {
    if (k < 1 || k > size() - 1) {
        throw std::out_of_range("spacing: k must be in [1, n-1]");
    }
    return values_[static_cast<std::size_t>(k - 1)] - values_[static_cast<std::size_t>(k)];
}

double empirical_quantile(std::span<const double> raw, QuantileLevel tau) {
    if (raw.empty()) throw std::invalid_argument("empirical_quantile: sample must be non-empty");
    const Rank rank = rank_for(static_cast<std::int64_t>(raw.size()), tau);
    // Only the k-th largest is needed; select instead of sorting the copy.
    std::vector<double> work(raw.begin(), raw.end());
    auto nth = work.begin() + (rank.k - 1);
    std::nth_element(work.begin(), nth, work.end(), std::greater<>());
    return *nth;
}

double empirical_quantile(const SortedSample& sample, QuantileLevel tau) {
    return sample.order_statistic(rank_for(sample.size(), tau).k);
}

} // namespace qbandits
