#pragma once

#include <string>
#include <vector>

#include "lognls/config.hpp"

namespace lognls::driver {

struct ExperimentResult {
    int exit_code = 0;          // 0 ok, 2 invalid input, 3 numerical failure or failed check
    std::string summary_json;   // schema-versioned machine-readable summary
    std::vector<std::string> outputs; // files written, in write order
};

/// Execute the pipeline selected by cfg.kind and persist the declared
/// outputs under cfg.output.dir (joined below output_root when nonempty).
/// Each file is written atomically, and on failure every file this run
/// already produced is removed; the summary then carries the error instead
/// of an output list.
ExperimentResult run_experiment(const cfg::ExperimentConfig& cfg,
                                const std::string& output_root = "");

} // namespace lognls::driver
