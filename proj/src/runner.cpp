#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qbandits/experiments.hpp"
#include "qbandits/order_stats.hpp"

namespace qbandits {

namespace {

std::string fmt(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

std::filesystem::path ensure_out_dir(const std::optional<std::filesystem::path>& dir) {
    const std::filesystem::path out = dir.value_or("out");
    std::filesystem::create_directories(out);
    return out;
}

constexpr const char* kPlotScript = R"(#!/usr/bin/env python3
"""Plots probability of error against budget, one series per policy."""
import csv
import collections
import pathlib
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
series = collections.defaultdict(lambda: ([], [], []))
with open(here / "results.csv") as f:
    for row in csv.DictReader(f):
        xs, ys, errs = series[row["policy"]]
        xs.append(int(row["budget"]))
        ys.append(float(row["e_hat"]))
        errs.append(2 * float(row["stderr"]))

for policy, (xs, ys, errs) in sorted(series.items()):
    plt.errorbar(xs, ys, yerr=errs, marker="o", capsize=3, label=policy)
plt.xlabel("budget N")
plt.ylabel("probability of error")
plt.ylim(bottom=0)
plt.legend()
plt.tight_layout()
plt.savefig(here / "error_vs_budget.png", dpi=150)
print("wrote", here / "error_vs_budget.png")
)";

} // namespace

std::filesystem::path run_experiment(const ExperimentConfig& config, const RunnerOptions& opts) {
    const Environment env = build_environment(config);
    const std::filesystem::path out_dir = ensure_out_dir(config.out_dir);
    const std::filesystem::path csv_path = out_dir / "results.csv";

    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    csv << "policy,budget,runs,errors,e_hat,stderr,seed\n";
    for (const auto& policy : config.policies) {
        for (const std::int64_t budget : config.budgets) {
            EvalOptions eval_opts;
            eval_opts.common_random_numbers = config.common_random_numbers;
            eval_opts.jobs = opts.jobs;
            ErrorEstimate estimate;
            try {
                estimate = evaluate(env, policy, budget, config.runs, config.seed, eval_opts);
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "cell (policy=" << policy.name() << ", budget=" << budget
                    << ") failed: " << e.what();
                throw std::runtime_error(msg.str());
            }
            csv << policy.name() << ',' << budget << ',' << estimate.runs << ','
                << estimate.errors << ',' << fmt(estimate.e_hat) << ',' << fmt(estimate.stderr_)
                << ',' << config.seed << '\n';
            if (opts.log) {
                *opts.log << policy.name() << " N=" << budget << " e_hat=" << estimate.e_hat
                          << " (stderr " << estimate.stderr_ << ")\n";
            }
        }
    }
    csv.close();

    std::ofstream plot(out_dir / "plot_results.py");
    plot << kPlotScript;
    return csv_path;
}

BoundValidationResult run_bound_validation(const BoundValidationConfig& config,
                                           const RunnerOptions& opts) {
    BoundValidationResult result;
    RngStream root(config.seed);
    std::uint64_t task = 0;
    for (const auto& spec : config.specs) {
        if (!spec.is_parametric()) {
            throw ConfigError("bound validation requires parametric (IHR) specs");
        }
        for (const double tau_value : config.quantile_tau) {
            const QuantileLevel tau(tau_value);
            const double b_hat =
                estimate_bias_constant(spec, tau, config.bias_grid, config.oracle_trials,
                                       root.child(task++), opts.jobs);
            result.bias_constants.emplace_back(spec.name() + "@" + fmt(tau_value), b_hat);
            for (const std::int64_t n : config.quantile_n) {
                TailValidationReport report =
                    mc_validate_quantile_tail(spec, n, tau, b_hat, config.gammas, config.trials,
                                              root.child(task++), opts.jobs);
                for (auto& row : report.rows) result.rows.push_back(std::move(row));
            }
        }
        for (const std::int64_t n : config.os_n) {
            for (const std::int64_t k : config.os_k) {
                if (k >= n) {
                    throw ConfigError("os grid cell has k >= n: k=" + std::to_string(k) +
                                      ", n=" + std::to_string(n));
                }
                TailValidationReport report =
                    mc_validate_os_tail(spec, n, k, config.gammas, config.trials,
                                        config.oracle_trials, root.child(task++), opts.jobs);
                for (auto& row : report.rows) result.rows.push_back(std::move(row));
            }
        }
    }
    result.failed = std::any_of(result.rows.begin(), result.rows.end(),
                                [](const auto& r) { return !r.pass; });

    const std::filesystem::path out_dir = ensure_out_dir(config.out_dir);
    std::ofstream csv(out_dir / "bound_validation.csv");
    write_validation_csv(csv, result.rows);
    std::ofstream bias_csv(out_dir / "bias_constants.csv");
    bias_csv << "spec,b_hat\n";
    for (const auto& [name, b] : result.bias_constants) bias_csv << name << ',' << fmt(b) << '\n';

    if (opts.log) {
        for (const auto& row : result.rows) {
            *opts.log << (row.pass ? "ok   " : "FAIL ") << row.spec << " n=" << row.n
                      << " k=" << row.k << " gamma=" << row.gamma << " " << row.side
                      << " freq=" << row.frequency << " bound=" << row.bound << "\n";
        }
        *opts.log << (result.failed ? "FAILED" : "PASSED") << " (" << result.rows.size()
                  << " cells)\n";
    }
    return result;
}

ComplexityRunReport report_complexity(const ComplexityConfig& config, const RunnerOptions& opts) {
    ExperimentConfig env_config;
    env_config.environment = config.environment;
    env_config.tau = config.tau;
    env_config.m = config.m;
    const Environment env = build_environment(env_config);
    const auto num_arms = static_cast<std::size_t>(env.num_arms());

    ComplexityRunReport report;
    report.gap_profile = gaps(env);

    if (config.hazard_floors) {
        if (config.hazard_floors->size() != num_arms) {
            throw ConfigError("L override must list one value per arm");
        }
        report.hazard_floors = *config.hazard_floors;
    } else {
        report.hazard_floors.reserve(num_arms);
        for (const auto& arm : env.arms()) {
            if (!arm.is_parametric()) {
                throw ConfigError("empirical arms need an explicit L override");
            }
            report.hazard_floors.push_back(arm.hazard_lower_bound());
        }
    }

    if (config.bias_constants) {
        if (config.bias_constants->size() == 1) {
            report.bias_constants.assign(num_arms, config.bias_constants->front());
        } else if (config.bias_constants->size() == num_arms) {
            report.bias_constants = *config.bias_constants;
        } else {
            throw ConfigError("b override must be a scalar or one value per arm");
        }
    } else {
        RngStream root(config.seed);
        // Preset environments repeat a handful of distinct arms; estimate
        // each distinct spec once.
        std::vector<std::pair<DistributionSpec, double>> cache;
        report.bias_constants.reserve(num_arms);
        for (const auto& arm : env.arms()) {
            if (!arm.is_parametric()) {
                throw ConfigError("empirical arms need an explicit b override");
            }
            auto hit = std::find_if(cache.begin(), cache.end(),
                                    [&](const auto& entry) { return entry.first == arm; });
            if (hit == cache.end()) {
                const double b =
                    estimate_bias_constant(arm, env.tau(), config.bias_grid,
                                           config.oracle_trials,
                                           root.child(cache.size()), opts.jobs);
                cache.emplace_back(arm, b);
                hit = cache.end() - 1;
            }
            report.bias_constants.push_back(hit->second);
        }
    }

    ComplexityInputs inputs;
    inputs.gaps = report.gap_profile.delta;
    inputs.hazard_floors = report.hazard_floors;
    inputs.bias_constants = report.bias_constants;
    inputs.tau = env.tau().tau;
    report.complexity = problem_complexity(inputs);

    for (const std::int64_t budget : config.budgets) {
        report.bounds_variant.emplace_back(
            budget, qsar_error_bound(budget, env.num_arms(), env.tau().tau, report.complexity,
                                     true));
        try {
            report.bounds.emplace_back(
                budget, qsar_error_bound(budget, env.num_arms(), env.tau().tau,
                                         report.complexity, false));
        } catch (const std::domain_error&) {
            // Budget below the bound's minimum; only the variant form applies.
        }
    }

    if (config.out_dir) {
        const std::filesystem::path out_dir = ensure_out_dir(config.out_dir);
        std::ofstream csv(out_dir / "complexity.csv");
        csv << "budget,bound,bound_variant\n";
        for (std::size_t i = 0; i < report.bounds_variant.size(); ++i) {
            const auto [budget, variant] = report.bounds_variant[i];
            csv << budget << ',';
            const auto exact = std::find_if(report.bounds.begin(), report.bounds.end(),
                                            [&](const auto& e) { return e.first == budget; });
            if (exact != report.bounds.end()) csv << fmt(exact->second);
            csv << ',' << fmt(variant) << '\n';
        }
    }
    return report;
}

void print_complexity_report(std::ostream& out, const Environment& env,
                             const ComplexityRunReport& report) {
    const auto& profile = report.gap_profile;
    out << "arm  quantile      gap           L             b             optimal\n";
    for (std::int64_t i = 0; i < env.num_arms(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const bool optimal = std::binary_search(profile.optimal_set.begin(),
                                                profile.optimal_set.end(), idx);
        out << std::left << std::setw(5) << i << std::setw(14) << env.true_quantiles()[idx]
            << std::setw(14) << profile.delta[idx] << std::setw(14) << report.hazard_floors[idx]
            << std::setw(14) << report.bias_constants[idx] << (optimal ? "*" : "") << "\n";
    }
    out << "min gap: " << profile.delta_sorted.front() << "\n";
    out << "H^tau   = " << report.complexity.h_tau << "  (arm " << report.complexity.h_tau_argmax.arm
        << ", gap rank " << report.complexity.h_tau_argmax.gap_rank << ")\n";
    out << "H~^tau  = " << report.complexity.h_tilde << "  (arm "
        << report.complexity.h_tilde_argmax.arm << ", gap rank "
        << report.complexity.h_tilde_argmax.gap_rank << ")\n";
    out << "C       = " << report.complexity.constant_c << "\n";
    out << "budget        error bound   variant bound\n";
    for (const auto& [budget, variant] : report.bounds_variant) {
        out << std::left << std::setw(14) << budget;
        const auto exact = std::find_if(report.bounds.begin(), report.bounds.end(),
                                        [&](const auto& e) { return e.first == budget; });
        if (exact != report.bounds.end()) {
            out << std::setw(14) << exact->second;
        } else {
            out << std::setw(14) << "-";
        }
        out << variant << "\n";
    }
}

} // namespace qbandits
