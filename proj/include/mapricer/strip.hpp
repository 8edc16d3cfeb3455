#pragma once

#include <algorithm>
#include <limits>
#include <string>

namespace mapricer {

// Open interval (lo, hi) on which an MGF is analytic.  Evaluation requires
// strict interior membership with a fixed margin: MGFs blow up at the edges.
struct Strip {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static constexpr double kMargin = 1e-9;

    static Strip whole_line() { return {}; }

    bool contains(double re_z) const {
        return re_z > lo + kMargin && re_z < hi - kMargin;
    }

    Strip intersect(const Strip& other) const {
        return {std::max(lo, other.lo), std::min(hi, other.hi)};
    }

    bool empty() const { return lo + kMargin >= hi - kMargin; }

    std::string describe() const;
};

}  // namespace mapricer
