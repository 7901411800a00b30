#include <cstdint>
#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qbandits/experiments.hpp"
#include "qbandits/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitValidationFailed = 3;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int jobs = qbandits::default_jobs();
    bool crn = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* opt = cmd->add_option("--config", flags.config_path, "path to a JSON config file");
    if (config_required) opt->required();
    cmd->add_option("--seed", flags.seed, "override the config seed");
    cmd->add_option("--out", flags.out, "output directory (overrides config)");
    cmd->add_option("--jobs", flags.jobs, "worker threads (results do not depend on it)");
}

int cmd_run(const CommonFlags& flags) {
    qbandits::ExperimentConfig config = qbandits::load_config(flags.config_path);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out) config.out_dir = *flags.out;
    if (flags.crn) config.common_random_numbers = true;
    qbandits::RunnerOptions opts;
    opts.jobs = flags.jobs;
    opts.log = &std::cout;
    const auto csv = qbandits::run_experiment(config, opts);
    std::cout << "wrote " << csv.string() << "\n";
    return kExitOk;
}

int cmd_validate_bounds(const CommonFlags& flags) {
    qbandits::BoundValidationConfig config = flags.config_path.empty()
                                                 ? qbandits::default_bound_validation_config()
                                                 : qbandits::load_bound_validation_config(
                                                       flags.config_path);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out) config.out_dir = *flags.out;
    qbandits::RunnerOptions opts;
    opts.jobs = flags.jobs;
    opts.log = &std::cout;
    const auto result = qbandits::run_bound_validation(config, opts);
    return result.failed ? kExitValidationFailed : kExitOk;
}

int cmd_complexity(const CommonFlags& flags) {
    qbandits::ComplexityConfig config = qbandits::load_complexity_config(flags.config_path);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out) config.out_dir = *flags.out;
    qbandits::RunnerOptions opts;
    opts.jobs = flags.jobs;
    const auto report = qbandits::report_complexity(config, opts);

    qbandits::ExperimentConfig env_config;
    env_config.environment = config.environment;
    env_config.tau = config.tau;
    env_config.m = config.m;
    const qbandits::Environment env = qbandits::build_environment(env_config);
    qbandits::print_complexity_report(std::cout, env, report);
    return kExitOk;
}

int cmd_ingest_check(const std::string& directory) {
    qbandits::IngestReport report;
    qbandits::ingest_arm_data(directory, &report);
    std::cout << "file                 count   median      min         max\n";
    for (const auto& arm : report.arms) {
        std::cout << std::left << std::setw(21) << arm.filename << std::setw(8) << arm.count
                  << std::setw(12) << arm.median << std::setw(12) << arm.min << arm.max << "\n";
    }
    std::cout << report.arms.size() << " arms ok\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantile-bandit experiments: fixed-budget best-arm identification"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run = app.add_subcommand("run", "run a policy/budget experiment grid");
    add_common(run, run_flags, true);
    run->add_flag("--crn", run_flags.crn, "share reward streams across policies");

    CommonFlags validate_flags;
    auto* validate =
        app.add_subcommand("validate-bounds", "Monte-Carlo check of the concentration bounds");
    add_common(validate, validate_flags, false);

    CommonFlags complexity_flags;
    auto* complexity =
        app.add_subcommand("complexity", "problem complexity and error-bound report");
    add_common(complexity, complexity_flags, true);

    std::string ingest_dir;
    auto* ingest = app.add_subcommand("ingest-check", "validate a directory of arm_*.csv files");
    ingest->add_option("directory", ingest_dir, "directory containing arm_*.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (validate->parsed()) return cmd_validate_bounds(validate_flags);
        if (complexity->parsed()) return cmd_complexity(complexity_flags);
        if (ingest->parsed()) return cmd_ingest_check(ingest_dir);
    } catch (const qbandits::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
