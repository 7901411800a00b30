#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qbandits/experiments.hpp"

namespace qbandits {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        // nlohmann reports "parse error at line L, column C: ..."
        throw ConfigError(path.string() + ": " + e.what());
    }
}

DistributionSpec parse_arm(const json& node, const std::filesystem::path& base_dir) {
    if (!node.is_object() || !node.contains("type")) {
        throw ConfigError("arm entries must be objects with a \"type\" field");
    }
    const std::string type = node.at("type").get<std::string>();
    try {
        if (type == "exponential") {
            return DistributionSpec::exponential(node.at("rate").get<double>());
        }
        if (type == "abs_gaussian") {
            return DistributionSpec::abs_gaussian(node.at("mu").get<double>(),
                                                  node.at("sigma").get<double>());
        }
        if (type == "empirical") {
            if (node.contains("file")) {
                std::filesystem::path file = node.at("file").get<std::string>();
                if (file.is_relative()) file = base_dir / file;
                return DistributionSpec::empirical(read_reward_csv(file));
            }
            return DistributionSpec::empirical(node.at("samples").get<std::vector<double>>());
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid arm: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError("invalid arm of type \"" + type + "\": " + e.what());
    }
    throw ConfigError("unknown arm type: " + type);
}

EnvironmentSource parse_environment(const json& node, const std::filesystem::path& base_dir) {
    if (node.is_string()) {
        return parse_preset(node.get<std::string>());
    }
    if (node.is_object() && node.contains("arms")) {
        InlineArms inline_arms;
        for (const auto& arm : node.at("arms")) {
            inline_arms.arms.push_back(parse_arm(arm, base_dir));
        }
        return inline_arms;
    }
    if (node.is_object() && node.contains("data_dir")) {
        std::filesystem::path dir = node.at("data_dir").get<std::string>();
        if (dir.is_relative()) dir = base_dir / dir;
        return DataDirectory{dir};
    }
    throw ConfigError(
        "environment must be a preset name, {\"arms\": [...]}, or {\"data_dir\": \"...\"}");
}

template <typename T>
T require(const json& node, const char* key) {
    if (!node.contains(key)) throw ConfigError(std::string("missing config field: ") + key);
    try {
        return node.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config field \"") + key + "\": " + e.what());
    }
}

} // namespace

PresetName parse_preset(std::string_view name) {
    if (name == "env1") return PresetName::env1;
    if (name == "env2") return PresetName::env2;
    if (name == "toy") return PresetName::toy;
    throw ConfigError("unknown preset: " + std::string(name));
}

std::vector<DistributionSpec> expand_preset(PresetName preset, std::int64_t m) {
    if (m < 1) throw ConfigError("preset expansion: m must be >= 1");
    const DistributionSpec a = DistributionSpec::abs_gaussian(0.0, 2.0);
    const DistributionSpec b = DistributionSpec::abs_gaussian(3.5, 2.0);
    const DistributionSpec c = DistributionSpec::exponential(0.25);
    std::vector<DistributionSpec> arms;
    switch (preset) {
        case PresetName::env1:
            arms.insert(arms.end(), 15, a);
            arms.insert(arms.end(), static_cast<std::size_t>(m), b);
            arms.insert(arms.end(), 5, c);
            break;
        case PresetName::env2:
            arms.insert(arms.end(), 15, a);
            arms.insert(arms.end(), 5, b);
            arms.insert(arms.end(), static_cast<std::size_t>(m), c);
            break;
        case PresetName::toy:
            arms = {a, b, c};
            break;
    }
    return arms;
}

double preset_default_tau(PresetName preset) {
    return preset == PresetName::env2 ? 0.8 : 0.5;
}

Environment build_environment(const ExperimentConfig& config) {
    std::vector<DistributionSpec> arms;
    double tau = 0;
    if (const auto* preset = std::get_if<PresetName>(&config.environment)) {
        arms = expand_preset(*preset, config.m);
        tau = config.tau.value_or(preset_default_tau(*preset));
    } else {
        if (!config.tau) throw ConfigError("tau is required for non-preset environments");
        tau = *config.tau;
        if (const auto* inline_arms = std::get_if<InlineArms>(&config.environment)) {
            arms = inline_arms->arms;
        } else {
            arms = ingest_arm_data(std::get<DataDirectory>(config.environment).path);
        }
    }
    try {
        return Environment(std::move(arms), QuantileLevel(tau), config.m);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid environment: ") + e.what());
    }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    const json root = parse_file(path);
    const std::filesystem::path base_dir = path.parent_path();

    ExperimentConfig config;
    if (!root.contains("environment")) throw ConfigError("missing config field: environment");
    config.environment = parse_environment(root.at("environment"), base_dir);
    if (root.contains("tau")) config.tau = root.at("tau").get<double>();
    config.m = require<std::int64_t>(root, "m");
    for (const auto& name : require<std::vector<std::string>>(root, "policies")) {
        try {
            config.policies.push_back(PolicyConfig::parse(name));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (config.policies.empty()) throw ConfigError("policies must be non-empty");
    config.budgets = require<std::vector<std::int64_t>>(root, "budgets");
    if (config.budgets.empty()) throw ConfigError("budgets must be non-empty");
    for (std::size_t i = 1; i < config.budgets.size(); ++i) {
        if (config.budgets[i] <= config.budgets[i - 1]) {
            throw ConfigError("budgets must be strictly increasing");
        }
    }
    config.runs = require<std::int64_t>(root, "runs");
    if (config.runs < 1) throw ConfigError("runs must be >= 1");
    if (root.contains("seed")) config.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("crn")) config.common_random_numbers = root.at("crn").get<bool>();
    if (root.contains("out")) {
        std::filesystem::path out = root.at("out").get<std::string>();
        config.out_dir = out.is_relative() ? base_dir / out : out;
    }

    // Expanding the environment validates arm specs, tau, and m eagerly, and
    // gives K for the per-policy minimum-budget check.
    const Environment env = build_environment(config);
    for (const auto& policy : config.policies) {
        const std::int64_t minimum =
            min_budget(policy, env.num_arms(), env.target_size(), env.tau());
        if (config.budgets.front() < minimum) {
            std::ostringstream msg;
            msg << "budget " << config.budgets.front() << " below minimum " << minimum
                << " for policy " << policy.name();
            throw ConfigError(msg.str());
        }
    }
    return config;
}

namespace {

std::vector<DistributionSpec> parse_spec_list(const json& root, const char* key,
                                              const std::filesystem::path& base_dir) {
    std::vector<DistributionSpec> specs;
    for (const auto& node : require<json>(root, key)) specs.push_back(parse_arm(node, base_dir));
    if (specs.empty()) throw ConfigError(std::string(key) + " must be non-empty");
    return specs;
}

} // namespace

BoundValidationConfig default_bound_validation_config() {
    BoundValidationConfig config;
    config.specs = {DistributionSpec::exponential(1.0), DistributionSpec::abs_gaussian(0.0, 2.0)};
    return config;
}

BoundValidationConfig load_bound_validation_config(const std::filesystem::path& path) {
    const json root = parse_file(path);
    BoundValidationConfig config = default_bound_validation_config();
    if (root.contains("specs")) config.specs = parse_spec_list(root, "specs", path.parent_path());
    for (const auto& spec : config.specs) {
        if (!spec.is_parametric()) {
            throw ConfigError("bound validation requires parametric (IHR) specs");
        }
    }
    if (root.contains("os")) {
        const json& os = root.at("os");
        if (os.contains("n")) config.os_n = os.at("n").get<std::vector<std::int64_t>>();
        if (os.contains("k")) config.os_k = os.at("k").get<std::vector<std::int64_t>>();
    }
    if (root.contains("quantile")) {
        const json& q = root.at("quantile");
        if (q.contains("n")) config.quantile_n = q.at("n").get<std::vector<std::int64_t>>();
        if (q.contains("tau")) config.quantile_tau = q.at("tau").get<std::vector<double>>();
    }
    if (root.contains("gammas")) config.gammas = root.at("gammas").get<std::vector<double>>();
    if (root.contains("trials")) config.trials = root.at("trials").get<std::int64_t>();
    if (root.contains("oracle_trials")) {
        config.oracle_trials = root.at("oracle_trials").get<std::int64_t>();
    }
    if (root.contains("bias_grid")) {
        config.bias_grid = root.at("bias_grid").get<std::vector<std::int64_t>>();
    }
    if (root.contains("seed")) config.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("out")) {
        std::filesystem::path out = root.at("out").get<std::string>();
        config.out_dir = out.is_relative() ? path.parent_path() / out : out;
    }
    if (config.trials < 1 || config.oracle_trials < 1) {
        throw ConfigError("trials and oracle_trials must be >= 1");
    }
    return config;
}

ComplexityConfig load_complexity_config(const std::filesystem::path& path) {
    const json root = parse_file(path);
    ComplexityConfig config;
    if (!root.contains("environment")) throw ConfigError("missing config field: environment");
    config.environment = parse_environment(root.at("environment"), path.parent_path());
    if (root.contains("tau")) config.tau = root.at("tau").get<double>();
    config.m = require<std::int64_t>(root, "m");
    config.budgets = require<std::vector<std::int64_t>>(root, "budgets");
    if (config.budgets.empty()) throw ConfigError("budgets must be non-empty");
    if (root.contains("L")) {
        config.hazard_floors = root.at("L").get<std::vector<double>>();
    }
    if (root.contains("b")) {
        if (root.at("b").is_number()) {
            config.bias_constants = std::vector<double>{root.at("b").get<double>()};
        } else {
            config.bias_constants = root.at("b").get<std::vector<double>>();
        }
    }
    if (root.contains("bias_grid")) {
        config.bias_grid = root.at("bias_grid").get<std::vector<std::int64_t>>();
    }
    if (root.contains("oracle_trials")) {
        config.oracle_trials = root.at("oracle_trials").get<std::int64_t>();
    }
    if (root.contains("seed")) config.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("out")) {
        std::filesystem::path out = root.at("out").get<std::string>();
        config.out_dir = out.is_relative() ? path.parent_path() / out : out;
    }
    return config;
}

} // namespace qbandits
