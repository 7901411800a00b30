#include "qbandits/policies.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qbandits/concentration.hpp"
#include "qbandits/order_stats.hpp"

namespace qbandits {

PolicyConfig PolicyConfig::parse(std::string_view name) {
    std::string canon;
    for (char c : name) {
        if (c == '-' || c == '_') continue;
        canon.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (canon == "qsar") return {PolicyVariant::qsar};
    if (canon == "qsr") return {PolicyVariant::qsr};
    if (canon == "sar") return {PolicyVariant::sar};
    if (canon == "sr") return {PolicyVariant::sr};
    if (canon == "quniform") return {PolicyVariant::q_uniform};
    if (canon == "qbe") return {PolicyVariant::q_be};
    throw std::invalid_argument("unknown policy: " + std::string(name));
}

std::string_view PolicyConfig::name() const {
    switch (variant) {
        case PolicyVariant::qsar: return "qsar";
        case PolicyVariant::qsr: return "qsr";
        case PolicyVariant::sar: return "sar";
        case PolicyVariant::sr: return "sr";
        case PolicyVariant::q_uniform: return "quniform";
        case PolicyVariant::q_be: return "qbe";
    }
    return "?";
}

bool PolicyConfig::quantile_based() const {
    return variant != PolicyVariant::sar && variant != PolicyVariant::sr;
}

std::uint64_t PolicyConfig::seed_tag() const {
    switch (variant) {
        case PolicyVariant::qsar: return 0xA1;
        case PolicyVariant::qsr: return 0xA2;
        case PolicyVariant::sar: return 0xA3;
        case PolicyVariant::sr: return 0xA4;
        case PolicyVariant::q_uniform: return 0xA5;
        case PolicyVariant::q_be: return 0xA6;
    }
    return 0;
}

PhaseSchedule build_schedule(std::int64_t num_arms, std::int64_t m, std::int64_t budget,
                             ScheduleFamily family) {
    if (num_arms < 2) throw std::invalid_argument("build_schedule: K must be >= 2");
    if (m < 1 || m >= num_arms) throw std::invalid_argument("build_schedule: requires 1 <= m < K");
    if (budget <= num_arms) throw std::invalid_argument("build_schedule: N must exceed K");

    PhaseSchedule schedule;
    const std::int64_t phases =
        family == ScheduleFamily::accept_reject ? num_arms - 1 : num_arms - m;
    schedule.normalizer = family == ScheduleFamily::accept_reject ? log_bar(num_arms)
                                                                  : log_tilde(num_arms, m);
    schedule.cumulative.resize(static_cast<std::size_t>(phases) + 1, 0);
    const double numer = static_cast<double>(budget - num_arms) / schedule.normalizer;
    for (std::int64_t p = 1; p <= phases; ++p) {
        // ceil of the exact ratio; the 1e-9 slack keeps FP noise from
        // rounding an exact integer up and overspending the budget.
        const double x = numer / static_cast<double>(num_arms + 1 - p);
        auto n_p = static_cast<std::int64_t>(std::ceil(x - 1e-9));
        n_p = std::max<std::int64_t>({n_p, 1, schedule.cumulative[static_cast<std::size_t>(p - 1)]});
        schedule.cumulative[static_cast<std::size_t>(p)] = n_p;
    }
    return schedule;
}

namespace {

// Smallest per-arm sample count whose quantile rank does not underflow.
std::int64_t min_pulls_for_rank(QuantileLevel tau) {
    auto n = static_cast<std::int64_t>(std::ceil(1.0 / (1.0 - tau.tau) - 1e-9));
    n = std::max<std::int64_t>(n, 1);
    for (;; ++n) {
        try {
            rank_for(n, tau);
            return n;
        } catch (const std::domain_error&) {
        }
    }
}

std::int64_t first_phase_pulls(std::int64_t num_arms, std::int64_t m, std::int64_t budget,
                               ScheduleFamily family) {
    return build_schedule(num_arms, m, budget, family).cumulative[1];
}

} // namespace

std::int64_t min_budget(const PolicyConfig& policy, std::int64_t num_arms, std::int64_t m,
                        QuantileLevel tau) {
    if (num_arms < 2) throw std::invalid_argument("min_budget: K must be >= 2");
    if (m < 1 || m >= num_arms) throw std::invalid_argument("min_budget: requires 1 <= m < K");
    const double k = static_cast<double>(num_arms);
    switch (policy.variant) {
        case PolicyVariant::sar:
        case PolicyVariant::sr:
            return num_arms + 1;
        case PolicyVariant::q_uniform:
            return num_arms * min_pulls_for_rank(tau);
        case PolicyVariant::q_be:
            return (num_arms - m) * num_arms * min_pulls_for_rank(tau);
        case PolicyVariant::qsar:
        case PolicyVariant::qsr: {
            const ScheduleFamily family = policy.variant == PolicyVariant::qsar
                                              ? ScheduleFamily::accept_reject
                                              : ScheduleFamily::reject_only;
            const double norm = family == ScheduleFamily::accept_reject
                                    ? log_bar(num_arms)
                                    : log_tilde(num_arms, m);
            const double analysis_floor = 4.0 / (1.0 - tau.tau) * norm + k;
            auto n = static_cast<std::int64_t>(std::ceil(analysis_floor - 1e-9));
            n = std::max(n, num_arms + 1);
            // The error-bound budget floor does not imply rank safety of n_1
            // for large K; bump until the first phase clears the rank floor.
            const std::int64_t pulls_needed = min_pulls_for_rank(tau);
            while (first_phase_pulls(num_arms, m, n, family) < pulls_needed) ++n;
            return n;
        }
    }
    throw std::logic_error("min_budget: unreachable");
}

EnvironmentSampler::EnvironmentSampler(const Environment& env, const RngStream& run_stream)
    : env_(env) {
    streams_.reserve(static_cast<std::size_t>(env.num_arms()));
    for (std::int64_t i = 0; i < env.num_arms(); ++i) {
        streams_.push_back(run_stream.child(static_cast<std::uint64_t>(i)));
    }
}

double EnvironmentSampler::pull(std::size_t arm) {
    return env_.arm(arm).sample(streams_[arm]);
}

namespace {

class PullLedger {
public:
    PullLedger(ArmSampler& sampler, std::int64_t num_arms)
        : sampler_(sampler),
          samples_(static_cast<std::size_t>(num_arms)),
          pulls_(static_cast<std::size_t>(num_arms), 0) {}

    void pull(std::size_t arm, std::int64_t times) {
        auto& buf = samples_[arm];
        buf.reserve(buf.size() + static_cast<std::size_t>(times));
        for (std::int64_t t = 0; t < times; ++t) buf.push_back(sampler_.pull(arm));
        pulls_[arm] += times;
        total_ += times;
    }

    double statistic(std::size_t arm, bool quantile, QuantileLevel tau) const {
        const auto& buf = samples_[arm];
        if (quantile) return empirical_quantile(buf, tau);
        return std::accumulate(buf.begin(), buf.end(), 0.0) / static_cast<double>(buf.size());
    }

    RunOutcome finish(std::vector<std::size_t> recommended) const {
        std::sort(recommended.begin(), recommended.end());
        return RunOutcome{std::move(recommended), total_, pulls_};
    }

private:
    ArmSampler& sampler_;
    std::vector<std::vector<double>> samples_;
    std::vector<std::int64_t> pulls_;
    std::int64_t total_ = 0;
};

// Active arms sorted by statistic, descending, ties broken by lower index.
std::vector<std::size_t> sort_by_statistic(const std::vector<std::size_t>& active,
                                           const std::vector<double>& stats) {
    std::vector<std::size_t> order = active;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (stats[a] != stats[b]) return stats[a] > stats[b];
        return a < b;
    });
    return order;
}

void erase_value(std::vector<std::size_t>& v, std::size_t value) {
    v.erase(std::find(v.begin(), v.end(), value));
}

void check_budget(const PolicyConfig& policy, std::int64_t num_arms, std::int64_t m,
                  QuantileLevel tau, std::int64_t budget) {
    const std::int64_t minimum = min_budget(policy, num_arms, m, tau);
    if (budget < minimum) {
        std::ostringstream msg;
        msg << "budget precondition violation: policy " << policy.name() << " requires N >= "
            << minimum << " for K=" << num_arms << ", m=" << m << ", tau=" << tau.tau
            << " (got " << budget << ")";
        throw std::invalid_argument(msg.str());
    }
}

RunOutcome run_accept_reject(ArmSampler& sampler, std::int64_t num_arms, std::int64_t m,
                             QuantileLevel tau, std::int64_t budget, bool quantile) {
    const PhaseSchedule schedule =
        build_schedule(num_arms, m, budget, ScheduleFamily::accept_reject);
    PullLedger ledger(sampler, num_arms);
    std::vector<std::size_t> active(static_cast<std::size_t>(num_arms));
    std::iota(active.begin(), active.end(), 0);
    std::vector<std::size_t> accepted;
    std::int64_t slots_left = m; // l_p

    std::vector<double> stats(static_cast<std::size_t>(num_arms), 0.0);
    for (std::int64_t p = 1; p <= num_arms - 1; ++p) {
        const std::int64_t fresh = schedule.cumulative[static_cast<std::size_t>(p)] -
                                   schedule.cumulative[static_cast<std::size_t>(p - 1)];
        for (std::size_t arm : active) ledger.pull(arm, fresh);
        for (std::size_t arm : active) stats[arm] = ledger.statistic(arm, quantile, tau);

        const std::vector<std::size_t> order = sort_by_statistic(active, stats);
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const double delta_best =
            stats[best] - stats[order[static_cast<std::size_t>(slots_left)]];
        const double delta_worst =
            stats[order[static_cast<std::size_t>(slots_left - 1)]] - stats[worst];

        // On an exact tie, accepting is forced when only l_p + 1 arms remain
        // active (rejecting would leave no a_{l_p+1} next phase); with
        // slots_left == 1 the m-th slot must stay open for the final active
        // arm, so ties reject.
        const bool accept =
            delta_best > delta_worst ||
            (delta_best == delta_worst &&
             static_cast<std::int64_t>(active.size()) == slots_left + 1 && slots_left >= 2);
        if (accept) {
            erase_value(active, best);
            accepted.push_back(best);
            --slots_left;
        } else {
            erase_value(active, worst);
        }
    }
    assert(active.size() == 1 && slots_left == 1);
    accepted.insert(accepted.end(), active.begin(), active.end());
    return ledger.finish(std::move(accepted));
}

RunOutcome run_reject_only(ArmSampler& sampler, std::int64_t num_arms, std::int64_t m,
                           QuantileLevel tau, std::int64_t budget, bool quantile) {
    const PhaseSchedule schedule = build_schedule(num_arms, m, budget, ScheduleFamily::reject_only);
    PullLedger ledger(sampler, num_arms);
    std::vector<std::size_t> active(static_cast<std::size_t>(num_arms));
    std::iota(active.begin(), active.end(), 0);

    std::vector<double> stats(static_cast<std::size_t>(num_arms), 0.0);
    for (std::int64_t p = 1; p <= num_arms - m; ++p) {
        const std::int64_t fresh = schedule.cumulative[static_cast<std::size_t>(p)] -
                                   schedule.cumulative[static_cast<std::size_t>(p - 1)];
        for (std::size_t arm : active) ledger.pull(arm, fresh);
        for (std::size_t arm : active) stats[arm] = ledger.statistic(arm, quantile, tau);
        // argmin, ties resolved to the higher index (mirrors the descending
        // sort with lower-index-first ties).
        std::size_t reject = active.front();
        for (std::size_t arm : active) {
            if (stats[arm] <= stats[reject]) reject = arm;
        }
        erase_value(active, reject);
    }
    return ledger.finish(std::move(active));
}

RunOutcome run_uniform(ArmSampler& sampler, std::int64_t num_arms, std::int64_t m,
                       QuantileLevel tau, std::int64_t budget, bool quantile) {
    const std::int64_t per_arm = budget / num_arms;
    PullLedger ledger(sampler, num_arms);
    std::vector<std::size_t> all(static_cast<std::size_t>(num_arms));
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> stats(static_cast<std::size_t>(num_arms), 0.0);
    for (std::size_t arm : all) ledger.pull(arm, per_arm);
    for (std::size_t arm : all) stats[arm] = ledger.statistic(arm, quantile, tau);
    const std::vector<std::size_t> order = sort_by_statistic(all, stats);
    return ledger.finish(
        std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m)));
}

RunOutcome run_batch_elimination(ArmSampler& sampler, std::int64_t num_arms, std::int64_t m,
                                 QuantileLevel tau, std::int64_t budget) {
    const std::int64_t batches = num_arms - m;
    const std::int64_t per_batch = budget / batches;
    PullLedger ledger(sampler, num_arms);
    std::vector<std::size_t> active(static_cast<std::size_t>(num_arms));
    std::iota(active.begin(), active.end(), 0);
    std::vector<double> stats(static_cast<std::size_t>(num_arms), 0.0);
    for (std::int64_t b = 0; b < batches; ++b) {
        const std::int64_t per_arm = per_batch / static_cast<std::int64_t>(active.size());
        for (std::size_t arm : active) ledger.pull(arm, per_arm);
        for (std::size_t arm : active) stats[arm] = ledger.statistic(arm, true, tau);
        std::size_t reject = active.front();
        for (std::size_t arm : active) {
            if (stats[arm] <= stats[reject]) reject = arm;
        }
        erase_value(active, reject);
    }
    return ledger.finish(std::move(active));
}

} // namespace

RunOutcome run_policy_with(const PolicyConfig& policy, ArmSampler& sampler,
                           std::int64_t num_arms, std::int64_t m, QuantileLevel tau,
                           std::int64_t budget) {
    check_budget(policy, num_arms, m, tau, budget);
    switch (policy.variant) {
        case PolicyVariant::qsar:
            return run_accept_reject(sampler, num_arms, m, tau, budget, true);
        case PolicyVariant::sar:
            return run_accept_reject(sampler, num_arms, m, tau, budget, false);
        case PolicyVariant::qsr:
            return run_reject_only(sampler, num_arms, m, tau, budget, true);
        case PolicyVariant::sr:
            return run_reject_only(sampler, num_arms, m, tau, budget, false);
        case PolicyVariant::q_uniform:
            return run_uniform(sampler, num_arms, m, tau, budget, true);
        case PolicyVariant::q_be:
            return run_batch_elimination(sampler, num_arms, m, tau, budget);
    }
    throw std::logic_error("run_policy_with: unreachable");
}

RunOutcome run_policy(const PolicyConfig& policy, const Environment& env, std::int64_t budget,
                      const RngStream& stream) {
    EnvironmentSampler sampler(env, stream);
    return run_policy_with(policy, sampler, env.num_arms(), env.target_size(), env.tau(), budget);
}

RunOutcome run_qsar(const Environment& env, std::int64_t budget, const RngStream& stream) {
    return run_policy({PolicyVariant::qsar}, env, budget, stream);
}
RunOutcome run_qsr(const Environment& env, std::int64_t budget, const RngStream& stream) {
    return run_policy({PolicyVariant::qsr}, env, budget, stream);
}
RunOutcome run_sar(const Environment& env, std::int64_t budget, const RngStream& stream) {
    return run_policy({PolicyVariant::sar}, env, budget, stream);
}
RunOutcome run_sr(const Environment& env, std::int64_t budget, const RngStream& stream) {
    return run_policy({PolicyVariant::sr}, env, budget, stream);
}
RunOutcome run_quniform(const Environment& env, std::int64_t budget, const RngStream& stream) {
    return run_policy({PolicyVariant::q_uniform}, env, budget, stream);
}
RunOutcome run_qbe(const Environment& env, std::int64_t budget, const RngStream& stream) {
    return run_policy({PolicyVariant::q_be}, env, budget, stream);
}

} // namespace qbandits
