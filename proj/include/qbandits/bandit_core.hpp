#pragma once

#include <cstdint>
#include <vector>

#include "qbandits/distributions.hpp"

namespace qbandits {

struct PolicyConfig;

// A bandit instance: K arms, the quantile level used to rank them, and the
// number m of arms to recommend. Construction verifies 1 <= m < K and that
// the optimal set is unique (m-th and (m+1)-th best true quantiles differ).
class Environment {
public:
    Environment(std::vector<DistributionSpec> arms, QuantileLevel tau, std::int64_t m);

    std::int64_t num_arms() const { return static_cast<std::int64_t>(arms_.size()); }
    std::int64_t target_size() const { return m_; }
    QuantileLevel tau() const { return tau_; }
    const DistributionSpec& arm(std::size_t i) const { return arms_[i]; }
    const std::vector<DistributionSpec>& arms() const { return arms_; }
    const std::vector<double>& true_quantiles() const { return true_quantiles_; }

private:
    std::vector<DistributionSpec> arms_;
    QuantileLevel tau_;
    std::int64_t m_;
    std::vector<double> true_quantiles_;
};

// Indices (0-based, ascending) of the m arms with the largest true
// tau-quantiles.
std::vector<std::size_t> true_optimal_set(const Environment& env);

struct GapProfile {
    std::vector<double> delta;            // per-arm gap Delta_i
    std::vector<double> delta_sorted;     // ascending
    std::vector<std::size_t> optimal_set; // ascending arm indices
};

// Delta_i = Q_i - Q_{o_{m+1}} for optimal arms, Q_{o_m} - Q_i otherwise.
GapProfile gaps(const Environment& env);

struct RunOutcome {
    std::vector<std::size_t> recommended;  // ascending, size m
    std::int64_t pulls_used = 0;
    std::vector<std::int64_t> pull_counts; // T_i(N) per arm
};

struct ErrorEstimate {
    std::int64_t runs = 0;
    std::int64_t errors = 0;
    double e_hat = 0;
    double stderr_ = 0; // sqrt(e_hat (1 - e_hat) / runs)
};

struct EvalOptions {
    // Shared streams across policies: per-run randomness keyed by the base
    // seed only, so different policies see identical reward draws.
    bool common_random_numbers = false;
    int jobs = 1;
};

// Per-run outcomes for `runs` independent episodes. Deterministic in
// (env, policy, budget, base_seed) regardless of jobs.
std::vector<RunOutcome> evaluate_runs(const Environment& env, const PolicyConfig& policy,
                                      std::int64_t budget, std::int64_t runs,
                                      std::uint64_t base_seed, const EvalOptions& opts = {});

// Empirical probability of error against true_optimal_set(env).
ErrorEstimate evaluate(const Environment& env, const PolicyConfig& policy, std::int64_t budget,
                       std::int64_t runs, std::uint64_t base_seed, const EvalOptions& opts = {});

} // namespace qbandits
