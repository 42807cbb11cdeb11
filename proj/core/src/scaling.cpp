#include "ethlab/scaling.hpp"

#include "ethlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ethlab {

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty sample");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
    return 0.5 * (lower + upper);
}

ScalingFit fit_scaling(const std::vector<double>& n, const std::vector<double>& y) {
    if (n.size() != y.size()) throw InvalidArgument("fit_scaling: size mismatch");
    std::map<double, std::vector<double>> groups;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0)) throw DomainError("fit_scaling: dimensions must be positive");
        if (!std::isnan(y[i])) groups[n[i]].push_back(y[i]);
    }
    if (groups.size() < 3) throw InvalidArgument("fit_scaling: need at least 3 distinct N");

    ScalingFit fit;
    for (auto& [key, values] : groups) {
        const double med = median(std::move(values));
        if (!(med > 0.0)) throw DomainError("fit_scaling: medians must be positive for a log fit");
        fit.log_n.push_back(std::log(key));
        fit.log_y.push_back(std::log(med));
    }
    const auto k = static_cast<double>(fit.log_n.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < fit.log_n.size(); ++i) {
        mx += fit.log_n[i];
        my += fit.log_y[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < fit.log_n.size(); ++i) {
        const double dx = fit.log_n[i] - mx, dy = fit.log_y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < fit.log_n.size(); ++i) {
        const double r = fit.log_y[i] - (fit.intercept + fit.slope * fit.log_n[i]);
        sse += r * r;
    }
    // Relative cutoff so that exactly collinear inputs report r^2 = 1 despite rounding.
    const double scale = std::max(1.0, my * my) * k;
    fit.r_squared = (syy <= 1e-24 * scale || sse <= 1e-24 * scale) ? 1.0 : 1.0 - sse / syy;
    return fit;
}

ScalingFit fit_scaling(const Table& table, std::string_view y_column, std::string_view kind) {
    const bool filter = !kind.empty() && table.has_column("kind");
    std::vector<double> n, y;
    for (std::size_t r = 0; r < table.size(); ++r) {
        if (filter && table.cell(r, "kind") != kind) continue;
        n.push_back(table.real(r, "N"));
        y.push_back(table.real(r, y_column));
    }
    return fit_scaling(n, y);
}

} // namespace ethlab
