#include "qbandits/bandit_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qbandits/parallel.hpp"
#include "qbandits/policies.hpp"

namespace qbandits {

namespace {

// Arm indices sorted by true quantile descending, ties by lower index.
std::vector<std::size_t> optimality_order(const std::vector<double>& quantiles) {
    std::vector<std::size_t> order(quantiles.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (quantiles[a] != quantiles[b]) return quantiles[a] > quantiles[b];
        return a < b;
    });
    return order;
}

} // namespace

Environment::Environment(std::vector<DistributionSpec> arms, QuantileLevel tau, std::int64_t m)
    : arms_(std::move(arms)), tau_(tau), m_(m) {
    const auto num_arms = static_cast<std::int64_t>(arms_.size());
    if (num_arms < 2) throw std::invalid_argument("environment: needs at least 2 arms");
    if (m_ < 1 || m_ >= num_arms) {
        throw std::invalid_argument("environment: requires 1 <= m < K");
    }
    true_quantiles_.reserve(arms_.size());
    for (const auto& arm : arms_) true_quantiles_.push_back(arm.true_quantile(tau_));
    const auto order = optimality_order(true_quantiles_);
    const double boundary_in = true_quantiles_[order[static_cast<std::size_t>(m_ - 1)]];
    const double boundary_out = true_quantiles_[order[static_cast<std::size_t>(m_)]];
    if (!(boundary_in > boundary_out)) {
        throw std::domain_error("environment: non-unique optimal set");
    }
}

std::vector<std::size_t> true_optimal_set(const Environment& env) {
    const auto order = optimality_order(env.true_quantiles());
    std::vector<std::size_t> best(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(env.target_size()));
    std::sort(best.begin(), best.end());
    return best;
}

GapProfile gaps(const Environment& env) {
    const auto& q = env.true_quantiles();
    const auto order = optimality_order(q);
    const auto m = static_cast<std::size_t>(env.target_size());
    const double q_m = q[order[m - 1]];
    const double q_m1 = q[order[m]];

    GapProfile profile;
    profile.optimal_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(profile.optimal_set.begin(), profile.optimal_set.end());
    profile.delta.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const bool optimal = std::binary_search(profile.optimal_set.begin(),
                                                profile.optimal_set.end(), i);
        profile.delta[i] = optimal ? q[i] - q_m1 : q_m - q[i];
    }
    profile.delta_sorted = profile.delta;
    std::sort(profile.delta_sorted.begin(), profile.delta_sorted.end());
    return profile;
}

std::vector<RunOutcome> evaluate_runs(const Environment& env, const PolicyConfig& policy,
                                      std::int64_t budget, std::int64_t runs,
                                      std::uint64_t base_seed, const EvalOptions& opts) {
    if (runs < 1) throw std::invalid_argument("evaluate: runs must be >= 1");
    // Shared streams (CRN) key runs off the bare seed so every policy sees
    // the same draws; otherwise the policy tag decorrelates them.
    const RngStream root(base_seed);
    const RngStream base = opts.common_random_numbers ? root : root.child(policy.seed_tag());
    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(runs));
    parallel_blocks(runs, 64, opts.jobs, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
            try {
                outcomes[static_cast<std::size_t>(r)] =
                    run_policy(policy, env, budget, base.child(static_cast<std::uint64_t>(r)));
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "run " << r << " of policy " << policy.name() << ": " << e.what();
                throw std::runtime_error(msg.str());
            }
        }
    });
    return outcomes;
}

ErrorEstimate evaluate(const Environment& env, const PolicyConfig& policy, std::int64_t budget,
                       std::int64_t runs, std::uint64_t base_seed, const EvalOptions& opts) {
    const std::vector<std::size_t> truth = true_optimal_set(env);
    const std::vector<RunOutcome> outcomes =
        evaluate_runs(env, policy, budget, runs, base_seed, opts);
    ErrorEstimate estimate;
    estimate.runs = runs;
    for (const auto& outcome : outcomes) estimate.errors += (outcome.recommended != truth);
    estimate.e_hat = static_cast<double>(estimate.errors) / static_cast<double>(runs);
    estimate.stderr_ =
        std::sqrt(estimate.e_hat * (1.0 - estimate.e_hat) / static_cast<double>(runs));
    return estimate;
}

} // namespace qbandits
