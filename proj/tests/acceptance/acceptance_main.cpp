// Acceptance suite: one line per criterion, exit code = number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qbandits/bandit_core.hpp"
#include "qbandits/concentration.hpp"
#include "qbandits/distributions.hpp"
#include "qbandits/experiments.hpp"
#include "qbandits/order_stats.hpp"
#include "qbandits/parallel.hpp"
#include "qbandits/policies.hpp"

using namespace qbandits;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;
int g_jobs = default_jobs();
int g_failures = 0;

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& why) {
        if (!condition && ok) {
            ok = false;
            detail = why;
        }
    }
};

void run_criterion(int number, const std::string& title,
                   const std::function<void(Check&)>& body) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (check.ok ? "[PASS] " : "[FAIL] ") << "criterion " << number << ": " << title << " ("
         << seconds << "s)";
    if (!check.ok) line << "\n       " << check.detail;
    std::cout << line.str() << std::endl;
    if (!check.ok) ++g_failures;
}

Environment preset_env(PresetName preset, std::int64_t m, std::optional<double> tau = {}) {
    ExperimentConfig config;
    config.environment = preset;
    config.m = m;
    config.tau = tau;
    return build_environment(config);
}

std::string fmt_stat(double value) {
    std::ostringstream out;
    out << value;
    return out.str();
}

// ---------------------------------------------------------------------------
// 1. Table of preset arm statistics and minimum gaps.

void criterion_table_statistics(Check& check) {
    struct Cell {
        DistributionSpec spec;
        double mean, q50, q80;
    };
    const std::vector<Cell> table = {
        {DistributionSpec::abs_gaussian(0.0, 2.0), 1.60, 1.35, 2.55},
        {DistributionSpec::abs_gaussian(3.5, 2.0), 3.60, 3.50, 5.21},
        {DistributionSpec::exponential(0.25), 4.00, 2.76, 6.42},
    };
    for (const auto& cell : table) {
        check.expect(std::fabs(cell.spec.mean() - cell.mean) <= 0.05,
                     cell.spec.name() + " mean " + fmt_stat(cell.spec.mean()) + " vs " +
                         fmt_stat(cell.mean));
        const double q50 = cell.spec.true_quantile(QuantileLevel(0.5));
        const double q80 = cell.spec.true_quantile(QuantileLevel(0.8));
        check.expect(std::fabs(q50 - cell.q50) <= 0.05,
                     cell.spec.name() + " q50 " + fmt_stat(q50));
        check.expect(std::fabs(q80 - cell.q80) <= 0.05,
                     cell.spec.name() + " q80 " + fmt_stat(q80));
    }

    // minimum gaps: mean 0.40 (tau-free), 0.5-quantile 0.74, 0.8-quantile 1.21
    const double mean_gap = table[2].spec.mean() - table[1].spec.mean();
    check.expect(std::fabs(mean_gap - 0.40) <= 0.05, "mean gap " + fmt_stat(mean_gap));

    const GapProfile g_half = gaps(preset_env(PresetName::toy, 1, 0.5));
    check.expect(std::fabs(g_half.delta_sorted.front() - 0.74) <= 0.05,
                 "0.5-quantile min gap " + fmt_stat(g_half.delta_sorted.front()));
    const GapProfile g_eight = gaps(preset_env(PresetName::toy, 1, 0.8));
    check.expect(std::fabs(g_eight.delta_sorted.front() - 1.21) <= 0.05,
                 "0.8-quantile min gap " + fmt_stat(g_eight.delta_sorted.front()));
}

// ---------------------------------------------------------------------------
// 2. Q-SAR == Q-SR at m = 1 over 200 random (preset, seed) pairs.

void criterion_m1_equivalence(Check& check) {
    const Environment env1 = preset_env(PresetName::env1, 1);
    const Environment env2 = preset_env(PresetName::env2, 1);
    const RngStream master(20260811);
    int agreements = 0;
    for (int pair = 0; pair < 200; ++pair) {
        const Environment& env = (pair % 2 == 0) ? env1 : env2;
        const RngStream stream = master.child(static_cast<std::uint64_t>(pair));
        const RunOutcome a = run_qsar(env, 3000, stream);
        const RunOutcome b = run_qsr(env, 3000, stream);
        agreements += (a.recommended == b.recommended);
    }
    check.expect(agreements == 200,
                 "agreed in " + std::to_string(agreements) + "/200 cases");
}

// ---------------------------------------------------------------------------
// 3. Monte-Carlo validation of the concentration bounds (the default
//    validate-bounds suite: Exp(1) and |N(0,2)|, n in {50,200}, tau = 0.5,
//    k in {5,25}, gamma in {1,2,3}, 1e5 trials, 1e6-sample oracle).

void criterion_concentration_suite(Check& check) {
    BoundValidationConfig config = default_bound_validation_config();
    config.seed = 7;
    const fs::path out = fs::temp_directory_path() / "qbandits_acceptance_bounds";
    config.out_dir = out;
    RunnerOptions opts;
    opts.jobs = g_jobs;
    const BoundValidationResult result = run_bound_validation(config, opts);
    int cells = 0;
    for (const auto& row : result.rows) {
        ++cells;
        if (!row.pass) {
            check.expect(false, row.spec + " n=" + std::to_string(row.n) + " k=" +
                                    std::to_string(row.k) + " gamma=" + fmt_stat(row.gamma) +
                                    " " + row.side + ": freq " + fmt_stat(row.frequency) +
                                    " > bound " + fmt_stat(row.bound) + " + 3se");
        }
    }
    check.expect(cells == 2 * (2 * 3 * 2 + 4 * 3 * 2),
                 "unexpected cell count " + std::to_string(cells));
    fs::remove_all(out);
}

// ---------------------------------------------------------------------------
// 4. Expected-spacing bound E[S_k] <= 1/(k L).

void criterion_spacing_bound(Check& check) {
    const std::int64_t reps = 100000;
    const std::int64_t n = 100;
    const std::vector<std::int64_t> ks{1, 5, 20};
    const std::vector<DistributionSpec> specs{DistributionSpec::exponential(1.0),
                                              DistributionSpec::abs_gaussian(0.0, 2.0)};
    for (std::size_t s = 0; s < specs.size(); ++s) {
        const DistributionSpec& spec = specs[s];
        const double floor = spec.hazard_lower_bound();
        // one pool of replications serves all three ranks
        const std::int64_t blocks = (reps + 4095) / 4096;
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(blocks),
                                              std::vector<double>(ks.size() * 2, 0.0));
        const RngStream root = RngStream(404).child(s);
        parallel_blocks(reps, 4096, g_jobs, [&](std::int64_t b, std::int64_t begin,
                                                std::int64_t end) {
            RngStream stream = root.child(static_cast<std::uint64_t>(b));
            auto& acc = sums[static_cast<std::size_t>(b)];
            for (std::int64_t r = begin; r < end; ++r) {
                SortedSample sample(spec.sample(n, stream));
                for (std::size_t i = 0; i < ks.size(); ++i) {
                    const double s = sample.spacing(ks[i]);
                    acc[2 * i] += s;
                    acc[2 * i + 1] += s * s;
                }
            }
        });
        for (std::size_t i = 0; i < ks.size(); ++i) {
            double sum = 0.0, sq = 0.0;
            for (const auto& acc : sums) {
                sum += acc[2 * i];
                sq += acc[2 * i + 1];
            }
            const double mean = sum / static_cast<double>(reps);
            const double se =
                std::sqrt((sq / static_cast<double>(reps) - mean * mean) /
                          static_cast<double>(reps));
            const double bound = 1.0 / (static_cast<double>(ks[i]) * floor);
            check.expect(mean <= bound + 3.0 * se,
                         spec.name() + " k=" + std::to_string(ks[i]) + ": E[S_k] " +
                             fmt_stat(mean) + " > " + fmt_stat(bound) + " + 3se " +
                             fmt_stat(3.0 * se));
        }
    }
}

// ---------------------------------------------------------------------------
// 5. Env II ordering at desk scale.

void criterion_env2_ordering(Check& check) {
    const Environment env = preset_env(PresetName::env2, 5);
    const std::vector<std::int64_t> budgets{2000, 6000, 10000};
    const std::vector<PolicyConfig> policies{
        {PolicyVariant::qsar}, {PolicyVariant::qsr}, {PolicyVariant::sar}, {PolicyVariant::sr}};
    const std::int64_t runs = 2000;
    EvalOptions opts;
    opts.jobs = g_jobs;

    std::vector<std::vector<ErrorEstimate>> grid(policies.size());
    for (std::size_t p = 0; p < policies.size(); ++p) {
        for (const std::int64_t budget : budgets) {
            grid[p].push_back(evaluate(env, policies[p], budget, runs, 2026, opts));
        }
    }
    auto combined = [](const ErrorEstimate& a, const ErrorEstimate& b) {
        return std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
    };

    // (a) e_hat non-increasing in budget within 2 stderr, every policy
    for (std::size_t p = 0; p < policies.size(); ++p) {
        for (std::size_t i = 1; i < budgets.size(); ++i) {
            const auto& lo = grid[p][i - 1];
            const auto& hi = grid[p][i];
            check.expect(hi.e_hat <= lo.e_hat + 2.0 * combined(lo, hi),
                         std::string(policies[p].name()) + " e_hat rose from " +
                             fmt_stat(lo.e_hat) + " to " + fmt_stat(hi.e_hat) + " at N=" +
                             std::to_string(budgets[i]));
        }
    }
    // (b) Q-SAR <= Q-SR + 2 stderr at every budget
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        const auto& qsar = grid[0][i];
        const auto& qsr = grid[1][i];
        check.expect(qsar.e_hat <= qsr.e_hat + 2.0 * combined(qsar, qsr),
                     "qsar " + fmt_stat(qsar.e_hat) + " > qsr " + fmt_stat(qsr.e_hat) +
                         " + 2se at N=" + std::to_string(budgets[i]));
    }
    // (c) Q-SR beats SR by more than 2 stderr at N = 2000
    const auto& qsr0 = grid[1][0];
    const auto& sr0 = grid[3][0];
    check.expect(qsr0.e_hat <= sr0.e_hat - 2.0 * combined(qsr0, sr0),
                 "qsr " + fmt_stat(qsr0.e_hat) + " not below sr " + fmt_stat(sr0.e_hat) +
                     " - 2se at N=2000");
}

// ---------------------------------------------------------------------------
// 6. Budget accounting for every policy over exhaustive small instances.

void criterion_budget_accounting(Check& check) {
    class ConstantSampler final : public ArmSampler {
    public:
        double pull(std::size_t arm) override { return static_cast<double>(arm) + 1.0; }
    };
    const QuantileLevel tau(0.5);
    const std::vector<PolicyConfig> policies{{PolicyVariant::qsar},      {PolicyVariant::qsr},
                                             {PolicyVariant::sar},       {PolicyVariant::sr},
                                             {PolicyVariant::q_uniform}, {PolicyVariant::q_be}};
    for (std::int64_t num_arms = 3; num_arms <= 8; ++num_arms) {
        for (std::int64_t m = 1; m < num_arms; ++m) {
            for (const auto& policy : policies) {
                const std::int64_t minimum = min_budget(policy, num_arms, m, tau);
                for (const std::int64_t budget :
                     {minimum, minimum + 1, minimum + 7, minimum + 23, 40 * num_arms + minimum}) {
                    ConstantSampler sampler;
                    const RunOutcome outcome =
                        run_policy_with(policy, sampler, num_arms, m, tau, budget);
                    check.expect(outcome.pulls_used <= budget,
                                 std::string(policy.name()) + " K=" + std::to_string(num_arms) +
                                     " m=" + std::to_string(m) + " N=" + std::to_string(budget) +
                                     ": used " + std::to_string(outcome.pulls_used));
                    check.expect(outcome.recommended.size() == static_cast<std::size_t>(m),
                                 std::string(policy.name()) + " returned wrong set size");
                }
            }
            // the Q-SR schedule display sum n_1 + ... + (m+1) n_{K-m} <= N
            for (const std::int64_t budget :
                 {num_arms + 9, std::int64_t{600}, std::int64_t{601}, std::int64_t{997}}) {
                if (budget <= num_arms) continue;
                const PhaseSchedule s =
                    build_schedule(num_arms, m, budget, ScheduleFamily::reject_only);
                std::int64_t display = 0;
                for (std::int64_t p = 1; p < s.phases(); ++p) display += s.cumulative[p];
                display += (m + 1) * s.cumulative[s.phases()];
                check.expect(display <= budget,
                             "qsr display sum " + std::to_string(display) + " > N=" +
                                 std::to_string(budget) + " at K=" + std::to_string(num_arms) +
                                 " m=" + std::to_string(m));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// 7. Bound calculators against brute-force oracles and numeric inversion.

void criterion_bound_oracles(Check& check) {
    std::mt19937 gen(2711);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // problem_complexity == exhaustive enumeration, exactly
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t num_arms = 2 + gen() % 7;
        ComplexityInputs in;
        in.tau = 0.1 + 0.8 * unif(gen);
        for (std::size_t i = 0; i < num_arms; ++i) {
            in.gaps.push_back(0.05 + 4.0 * unif(gen));
            in.hazard_floors.push_back(0.05 + 2.5 * unif(gen));
            in.bias_constants.push_back(4.0 * unif(gen));
        }
        const ComplexityReport got = problem_complexity(in);

        std::vector<double> sorted = in.gaps;
        std::sort(sorted.begin(), sorted.end());
        const double alpha = 4.0 * (1.0 + in.tau) / (1.0 - in.tau);
        const double alpha_t = 2.0 * (in.tau + 2.0) / (1.0 - in.tau);
        double h = 0.0, ht = 0.0, c = 0.0;
        for (std::size_t i = 0; i < num_arms; ++i) {
            const double L = in.hazard_floors[i];
            const double beta =
                (4.0 / 3.0) * (2.0 * L + in.bias_constants[i] * (1.0 - in.tau) * L * L);
            const double beta_t = 2.0 * L + in.bias_constants[i] * (1.0 - in.tau) * L * L;
            for (std::size_t j = 1; j <= num_arms; ++j) {
                const double gap = sorted[j - 1];
                const double scale = 8.0 * static_cast<double>(j) / (1.0 - in.tau);
                h = std::max(h, scale * (4.0 * alpha / (L * L * gap * gap) +
                                         beta / (L * L * gap)));
                ht = std::max(ht, scale * (4.0 * alpha_t / (L * L * gap * gap) +
                                           beta_t / (L * L * gap)));
                c = std::max(c, L * L * gap * gap / (8.0 * (4.0 * alpha_t + beta_t * gap)));
            }
        }
        check.expect(got.h_tau == h && got.h_tilde == ht && got.constant_c == c,
                     "complexity mismatch at rep " + std::to_string(rep));
    }

    // gamma-form radius vs epsilon-form probability under numeric inversion
    auto bisect_gamma = [](double v, double c, double eps) {
        auto radius = [&](double g) { return std::sqrt(2.0 * v * g) + c * g; };
        double lo = 0.0, hi = 1.0;
        while (radius(hi) < eps) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (radius(mid) < eps ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    int tested = 0;
    while (tested < 100) {
        const std::int64_t n = 20 + static_cast<std::int64_t>(gen() % 500);
        const double tau_value = 0.15 + 0.7 * unif(gen);
        const QuantileBoundParams p{n, QuantileLevel(tau_value), 0.05 + 2.0 * unif(gen),
                                    3.0 * unif(gen)};
        std::int64_t k = 0;
        try {
            k = rank_for(n, p.tau).k;
        } catch (const std::domain_error&) {
            continue;
        }
        if (k <= 1 || k >= n) continue;
        const double gamma = 1.0 + 9.0 * unif(gen);
        const double L = p.hazard_floor;
        const double w = p.bias_constant / static_cast<double>(n);
        const double vr = 2.0 / (static_cast<double>(k) * L * L);
        const double cr = 2.0 / (static_cast<double>(k) * L) + w;
        const double km1 = static_cast<double>(k - 1);
        const double vl = 2.0 * static_cast<double>(n - k + 1) / (km1 * km1 * L * L);

        const double eps_r = std::sqrt(2.0 * vr * gamma) + cr * gamma;
        const double eps_l = std::sqrt(2.0 * vl * gamma) + w * gamma;
        const double gr = invert_right_radius(p, eps_r);
        const double gl = invert_left_radius(p, eps_l);
        check.expect(std::fabs(gr - gamma) <= 1e-9,
                     "right inversion off by " + fmt_stat(gr - gamma));
        check.expect(std::fabs(gl - gamma) <= 1e-9,
                     "left inversion off by " + fmt_stat(gl - gamma));
        check.expect(std::fabs(bisect_gamma(vr, cr, eps_r) - gr) <= 1e-9,
                     "closed-form vs bisection mismatch");
        // the epsilon-form never claims more confidence than the inverted
        // gamma-form radius
        const auto probs = quantile_epsilon_bound(p, eps_r);
        check.expect(probs.right_exponent <= gr + 1e-9,
                     "epsilon-form exponent above inverted gamma (right)");
        const auto probs_l = quantile_epsilon_bound(p, eps_l);
        check.expect(probs_l.left_exponent <= gl + 1e-9,
                     "epsilon-form exponent above inverted gamma (left)");
        ++tested;
    }
}

// ---------------------------------------------------------------------------
// 8. CLI determinism: identical CSV bytes across reruns and --jobs settings.

void criterion_cli_determinism(Check& check) {
    if (g_cli_path.empty()) {
        check.expect(false, "no --cli path given");
        return;
    }
    const fs::path work = fs::temp_directory_path() / "qbandits_acceptance_cli";
    fs::remove_all(work);
    fs::create_directories(work);
    {
        std::ofstream config(work / "run.json");
        config << R"({
  "environment": "toy", "m": 1, "tau": 0.5,
  "policies": ["qsar", "qsr"],
  "budgets": [200, 400], "runs": 200, "seed": 7,
  "out": "outdir"
})";
    }
    auto run_cli = [&](const std::string& out_name, int jobs) {
        std::ostringstream cmd;
        cmd << '"' << g_cli_path << '"' << " run --config " << (work / "run.json") << " --out "
            << (work / out_name) << " --jobs " << jobs << " > /dev/null";
        return std::system(cmd.str().c_str());
    };
    check.expect(run_cli("a", 1) == 0, "first run failed");
    check.expect(run_cli("b", 1) == 0, "second run failed");
    check.expect(run_cli("c", 8) == 0, "jobs=8 run failed");

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(work / "a" / "results.csv");
    const std::string b = slurp(work / "b" / "results.csv");
    const std::string c = slurp(work / "c" / "results.csv");
    check.expect(!a.empty(), "empty results.csv");
    check.expect(a == b, "rerun with identical config/seed differs");
    check.expect(a == c, "--jobs 1 vs --jobs 8 differs");
    fs::remove_all(work);
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) g_cli_path = argv[++i];
        if (arg == "--jobs" && i + 1 < argc) g_jobs = std::atoi(argv[++i]);
    }

    run_criterion(1, "preset arm statistics and minimum gaps within 0.05",
                  criterion_table_statistics);
    run_criterion(2, "Q-SAR == Q-SR recommendations at m=1 (200 random pairs)",
                  criterion_m1_equivalence);
    run_criterion(3, "concentration bound Monte-Carlo suite", criterion_concentration_suite);
    run_criterion(4, "expected spacing bound E[S_k] <= 1/(kL)", criterion_spacing_bound);
    run_criterion(5, "env2 policy ordering at desk scale", criterion_env2_ordering);
    run_criterion(6, "budget accounting for every policy", criterion_budget_accounting);
    run_criterion(7, "bound calculators vs brute-force oracles and inversion",
                  criterion_bound_oracles);
    run_criterion(8, "CLI determinism across reruns and --jobs", criterion_cli_determinism);

    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
    } else {
        std::cout << "all 8 criteria passed" << std::endl;
    }
    return g_failures;
}
