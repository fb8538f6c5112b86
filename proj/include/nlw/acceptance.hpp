#pragma once

#include "nlw/config.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nlw {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    /// Measured quantities with their thresholds spelled out in the name.
    std::vector<std::pair<std::string, double>> metrics;
    std::string detail;   ///< error text if the run threw
    /// Wall-clock seconds. Kept out of the CSV so reruns are byte-identical.
    double seconds = 0;
};

/// Number of acceptance criteria.
inline constexpr int acceptance_count = 8;

/// Runs one criterion (1..8) on the grid and media of the configuration.
/// Errors are caught and reported as a failing result.
CriterionResult evaluate_criterion(int id, const Config& cfg, std::size_t jobs = 1);

/// criterion,name,metric,value,pass rows.
void write_acceptance_csv(const std::filesystem::path& path, const std::vector<CriterionResult>& results);

} // namespace nlw
