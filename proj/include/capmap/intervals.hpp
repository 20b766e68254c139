#pragma once

#include <vector>

namespace capmap {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool contains_strict(double x) const { return x > lo && x < hi; }
};

// Sorts and merges intervals whose closures touch (within eps) into a
// disjoint, ascending list.
std::vector<Interval> merge_intervals(std::vector<Interval> intervals, double eps = 0.0);

double total_measure(const std::vector<Interval>& intervals);

// Measure of the symmetric difference of two disjoint sorted interval lists.
double symmetric_difference_measure(const std::vector<Interval>& a,
                                    const std::vector<Interval>& b);

} // namespace capmap
