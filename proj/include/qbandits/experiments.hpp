#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qbandits/bandit_core.hpp"
#include "qbandits/concentration.hpp"
#include "qbandits/policies.hpp"

namespace qbandits {

// Bad configs and bad input data; the CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PresetName { env1, env2, toy };

PresetName parse_preset(std::string_view name);
// env1: 15 x |N(0,2)| + m x |N(3.5,2)| + 5 x Exp(1/4), tau = 0.5.
// env2: 15 x |N(0,2)| + 5 x |N(3.5,2)| + m x Exp(1/4), tau = 0.8.
// toy:  one arm of each, tau = 0.5.
std::vector<DistributionSpec> expand_preset(PresetName preset, std::int64_t m);
double preset_default_tau(PresetName preset);

struct InlineArms {
    std::vector<DistributionSpec> arms;
};
struct DataDirectory {
    std::filesystem::path path;
};
using EnvironmentSource = std::variant<PresetName, InlineArms, DataDirectory>;

struct ExperimentConfig {
    EnvironmentSource environment;
    std::optional<double> tau; // defaulted for presets
    std::int64_t m = 1;
    std::vector<PolicyConfig> policies;
    std::vector<std::int64_t> budgets; // strictly increasing
    std::int64_t runs = 5000;
    std::uint64_t seed = 0;
    bool common_random_numbers = false;
    std::optional<std::filesystem::path> out_dir;
};

ExperimentConfig load_config(const std::filesystem::path& path);
Environment build_environment(const ExperimentConfig& config);

struct IngestArmSummary {
    std::string filename;
    std::int64_t count = 0;
    double median = 0; // conventional middle-of-sample median
    double min = 0;
    double max = 0;
};

struct IngestReport {
    std::vector<IngestArmSummary> arms;
};

// One finite non-negative reward per line, optional "reward" header.
std::vector<double> read_reward_csv(const std::filesystem::path& file);

// Loads arm_*.csv files from a directory, ordered by filename.
std::vector<DistributionSpec> ingest_arm_data(const std::filesystem::path& directory,
                                              IngestReport* report = nullptr);

struct RunnerOptions {
    int jobs = 1;
    std::ostream* log = nullptr;
};

// Evaluates every (policy, budget) cell, writes results.csv and a matplotlib
// plot script next to it. Deterministic byte-for-byte in (config, seed).
std::filesystem::path run_experiment(const ExperimentConfig& config, const RunnerOptions& opts);

struct BoundValidationConfig {
    std::vector<DistributionSpec> specs;
    std::vector<std::int64_t> os_n{50, 200};
    std::vector<std::int64_t> os_k{5, 25};
    std::vector<std::int64_t> quantile_n{50, 200};
    std::vector<double> quantile_tau{0.5};
    std::vector<double> gammas{1, 2, 3};
    std::int64_t trials = 100000;
    std::int64_t oracle_trials = 1000000;
    std::vector<std::int64_t> bias_grid{64, 128, 256};
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> out_dir;
};

BoundValidationConfig default_bound_validation_config();
BoundValidationConfig load_bound_validation_config(const std::filesystem::path& path);

struct BoundValidationResult {
    std::vector<TailValidationRow> rows;
    std::vector<std::pair<std::string, double>> bias_constants; // (spec@tau, b_hat)
    bool failed = false;
};

BoundValidationResult run_bound_validation(const BoundValidationConfig& config,
                                           const RunnerOptions& opts);

struct ComplexityConfig {
    EnvironmentSource environment;
    std::optional<double> tau;
    std::int64_t m = 1;
    std::vector<std::int64_t> budgets;
    std::optional<std::vector<double>> hazard_floors;  // override / required for empirical
    std::optional<std::vector<double>> bias_constants; // override
    std::vector<std::int64_t> bias_grid{64, 128, 256};
    std::int64_t oracle_trials = 1000000;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> out_dir;
};

ComplexityConfig load_complexity_config(const std::filesystem::path& path);

struct ComplexityRunReport {
    GapProfile gap_profile;
    std::vector<double> hazard_floors;
    std::vector<double> bias_constants;
    ComplexityReport complexity;
    std::vector<std::pair<std::int64_t, double>> bounds;         // (budget, bound)
    std::vector<std::pair<std::int64_t, double>> bounds_variant; // variant form
};

ComplexityRunReport report_complexity(const ComplexityConfig& config, const RunnerOptions& opts);
void print_complexity_report(std::ostream& out, const Environment& env,
                             const ComplexityRunReport& report);

} // namespace qbandits
