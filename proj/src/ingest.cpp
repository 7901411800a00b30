#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "qbandits/experiments.hpp"

namespace qbandits {

std::vector<double> read_reward_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open reward file: " + file.string());
    std::vector<double> samples;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "reward") continue;
        std::size_t used = 0;
        double value = 0;
        try {
            value = std::stod(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != line.size()) {
            throw ConfigError(file.string() + " line " + std::to_string(line_no) +
                              ": not a number: " + line);
        }
        if (!std::isfinite(value) || value < 0.0) {
            throw ConfigError(file.string() + " line " + std::to_string(line_no) +
                              ": rewards must be finite and >= 0");
        }
        samples.push_back(value);
    }
    if (samples.empty()) throw ConfigError(file.string() + ": no rewards");
    return samples;
}

std::vector<DistributionSpec> ingest_arm_data(const std::filesystem::path& directory,
                                              IngestReport* report) {
    if (!std::filesystem::is_directory(directory)) {
        throw ConfigError("not a directory: " + directory.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.starts_with("arm_") && name.ends_with(".csv")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.size() < 2) {
        throw ConfigError("need at least 2 arm_*.csv files in " + directory.string() + ", found " +
                          std::to_string(files.size()));
    }

    std::vector<DistributionSpec> arms;
    for (const auto& file : files) {
        std::vector<double> samples = read_reward_csv(file);
        if (report) {
            std::vector<double> sorted = samples;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            IngestArmSummary summary;
            summary.filename = file.filename().string();
            summary.count = static_cast<std::int64_t>(n);
            summary.median =
                n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
            summary.min = sorted.front();
            summary.max = sorted.back();
            report->arms.push_back(std::move(summary));
        }
        arms.push_back(DistributionSpec::empirical(std::move(samples)));
    }
    return arms;
}

} // namespace qbandits
