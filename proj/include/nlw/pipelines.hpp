#pragma once

#include "nlw/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace nlw {

/// forward, expand, iomap, identity, probes, lightray, recover, report.
const std::vector<std::string>& subcommands();

/// <root>/<subcommand>-<16 hex digits of the config hash>.
std::filesystem::path output_directory(const std::filesystem::path& root, const std::string& subcommand, const Config& cfg);

struct RunOptions {
    std::size_t jobs = 1;          ///< worker cap; results do not depend on it
    std::ostream* log = nullptr;   ///< progress and timings, never written to the artifacts
};

/// Validates the configuration, writes config.ini and the artifacts of the
/// subcommand into `dir`. Returns 0, or 4 when `report` finds a failing
/// acceptance criterion. Library errors propagate.
int run_subcommand(const std::string& subcommand, const Config& cfg, const std::filesystem::path& dir,
                   const RunOptions& opt = {});

} // namespace nlw
