#pragma once

// Experiment orchestration: (N, trial) tasks run in parallel, rows are merged
// in task order and stably sorted by (N, trial, kind), so the output does not
// depend on the worker count.

#include "ethlab/config.hpp"
#include "ethlab/table.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ethlab {

/// Per-trial seed: mix(base_seed, N, trial, experiment tag).
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t base_seed, long n, long trial, Experiment experiment);

/// --threads if given, else ETHLAB_THREADS, else the hardware concurrency.
[[nodiscard]] int resolve_workers(std::optional<int> requested);

/// Common columns followed by the experiment-specific ones.
[[nodiscard]] std::vector<Column> schema(Experiment experiment);

[[nodiscard]] Table run(const ExperimentConfig& config, int workers = 1);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Row thresholds (admissible rows only) plus the aggregate checks of the
/// experiment: scaling slopes, degenerate controls, Lambda/Pi boundedness,
/// the renormalized mean.
[[nodiscard]] std::vector<Check> assess(const ExperimentConfig& config, const Table& table);

[[nodiscard]] inline bool all_passed(const std::vector<Check>& checks) {
    for (const Check& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

} // namespace ethlab
