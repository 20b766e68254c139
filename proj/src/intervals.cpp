#include "capmap/intervals.hpp"

#include <algorithm>

namespace capmap {

std::vector<Interval> merge_intervals(std::vector<Interval> intervals, double eps) {
    if (intervals.empty()) return intervals;
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    merged.push_back(intervals.front());
    for (std::size_t k = 1; k < intervals.size(); ++k) {
        const Interval& iv = intervals[k];
        if (iv.lo <= merged.back().hi + eps) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

double total_measure(const std::vector<Interval>& intervals) {
    double sum = 0.0;
    for (const Interval& iv : intervals) sum += iv.length();
    return sum;
}

double symmetric_difference_measure(const std::vector<Interval>& a,
                                    const std::vector<Interval>& b) {
    // sweep over endpoint events, accumulating stretches covered by exactly
    // one of the two lists
    struct Event {
        double x;
        int list;  // 0 = a, 1 = b
        int delta; // +1 open, -1 close
    };
    std::vector<Event> events;
    events.reserve(2 * (a.size() + b.size()));
    for (const Interval& iv : a) {
        events.push_back({iv.lo, 0, +1});
        events.push_back({iv.hi, 0, -1});
    }
    for (const Interval& iv : b) {
        events.push_back({iv.lo, 1, +1});
        events.push_back({iv.hi, 1, -1});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& u, const Event& v) { return u.x < v.x; });
    double sd = 0.0;
    double prev = 0.0;
    bool have_prev = false;
    int in_a = 0, in_b = 0;
    for (const Event& e : events) {
        if (have_prev && ((in_a > 0) != (in_b > 0))) sd += e.x - prev;
        if (e.list == 0)
            in_a += e.delta;
        else
            in_b += e.delta;
        prev = e.x;
        have_prev = true;
    }
    return sd;
}

} // namespace capmap
