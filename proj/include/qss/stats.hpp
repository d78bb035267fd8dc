// stats.hpp
// Small statistical helpers shared by reports and aggregation.

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace qss {

// Wilson score interval at ~95%.
inline std::pair<double, double> wilson_interval(int successes, int trials) {
    if (trials == 0) return {0.0, 0.0};
    const double z = 1.96;
    const double p = (double)successes / trials;
    const double z2n = z * z / trials;
    const double center = (p + z2n / 2.0) / (1.0 + z2n);
    const double half =
        z * std::sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials)) / (1.0 + z2n);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace qss
