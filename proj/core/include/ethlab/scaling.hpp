#pragma once

// Log-log least squares of per-N medians.

#include "ethlab/table.hpp"

#include <string_view>
#include <vector>

namespace ethlab {

struct ScalingFit {
    std::vector<double> log_n;
    std::vector<double> log_y;  // log of the per-N median
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;     // 1 when the medians are exactly collinear (incl. constant)
};

[[nodiscard]] double median(std::vector<double> values);

/// Groups y by n, takes medians, and fits log(median) = intercept + slope log n.
/// Needs at least 3 distinct n and positive medians.
[[nodiscard]] ScalingFit fit_scaling(const std::vector<double>& n, const std::vector<double>& y);

/// Same over table rows; `kind` restricts to rows with that kind when non-empty.
[[nodiscard]] ScalingFit fit_scaling(const Table& table, std::string_view y_column, std::string_view kind = {});

} // namespace ethlab
