#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qbandits/bandit_core.hpp"
#include "qbandits/distributions.hpp"
#include "qbandits/rng.hpp"

namespace qbandits {

enum class PolicyVariant { qsar, qsr, sar, sr, q_uniform, q_be };

struct PolicyConfig {
    PolicyVariant variant;

    static PolicyConfig parse(std::string_view name);
    std::string_view name() const;
    // Quantile-based variants rank arms by the environment's tau-quantile;
    // mean-based ones (sar, sr) ignore tau.
    bool quantile_based() const;
    // Stable per-variant salt mixed into seeds when streams are not shared.
    std::uint64_t seed_tag() const;
};

enum class ScheduleFamily {
    accept_reject, // K-1 phases, normalizer logbar(K)
    reject_only,   // K-m phases, normalizer logtilde(K)
};

struct PhaseSchedule {
    double normalizer;
    std::vector<std::int64_t> cumulative; // n_0 = 0, n_1, ..., n_P
    std::int64_t phases() const { return static_cast<std::int64_t>(cumulative.size()) - 1; }
};

PhaseSchedule build_schedule(std::int64_t num_arms, std::int64_t m, std::int64_t budget,
                             ScheduleFamily family);

// Smallest budget the variant accepts for (K, m, tau): the error-bound
// budget floor for Q-SAR/Q-SR joined with rank safety of the first phase,
// schedule positivity for SAR/SR, and the per-arm floors for Q-Uniform/Q-BE.
std::int64_t min_budget(const PolicyConfig& policy, std::int64_t num_arms, std::int64_t m,
                        QuantileLevel tau);

// Source of reward draws, one stream per arm. Policies only see this
// interface; tests substitute their own (e.g. permuted) samplers.
class ArmSampler {
public:
    virtual ~ArmSampler() = default;
    virtual double pull(std::size_t arm) = 0;
};

// Draws from env.arm(i) on substream run_stream.child(i); the j-th pull of
// an arm is independent of every other arm's pull order.
class EnvironmentSampler final : public ArmSampler {
public:
    EnvironmentSampler(const Environment& env, const RngStream& run_stream);
    double pull(std::size_t arm) override;

private:
    const Environment& env_;
    std::vector<RngStream> streams_;
};

// Decision procedures over an arm sampler. `statistic_tau.tau` is ignored by
// mean-based variants.
RunOutcome run_policy_with(const PolicyConfig& policy, ArmSampler& sampler,
                           std::int64_t num_arms, std::int64_t m, QuantileLevel tau,
                           std::int64_t budget);

RunOutcome run_policy(const PolicyConfig& policy, const Environment& env, std::int64_t budget,
                      const RngStream& stream);

RunOutcome run_qsar(const Environment& env, std::int64_t budget, const RngStream& stream);
RunOutcome run_qsr(const Environment& env, std::int64_t budget, const RngStream& stream);
RunOutcome run_sar(const Environment& env, std::int64_t budget, const RngStream& stream);
RunOutcome run_sr(const Environment& env, std::int64_t budget, const RngStream& stream);
RunOutcome run_quniform(const Environment& env, std::int64_t budget, const RngStream& stream);
RunOutcome run_qbe(const Environment& env, std::int64_t budget, const RngStream& stream);

} // namespace qbandits
