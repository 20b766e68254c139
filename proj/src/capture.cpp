#include "capmap/capture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "capmap/errors.hpp"
#include "capmap/root_finding.hpp"

namespace capmap {

const char* capture_case_name(CaptureCase c) {
    return c == CaptureCase::monotone ? "monotone" : "critical";
}

Interval linearized_backpull(const MapFamily& m, double x_ic, int depth, Interval ip_c,
                             double slope_floor) {
    if (depth == 0) return ip_c; // nothing to invert

    std::vector<double> path(static_cast<std::size_t>(depth) + 1);
    path[0] = x_ic;
    for (int k = 1; k <= depth; ++k) path[static_cast<std::size_t>(k)] = m.iterate(path[static_cast<std::size_t>(k - 1)], 1);

    bool degenerate = false;
    for (int k = 0; k < depth; ++k) {
        double d;
        try {
            d = m.derivative(path[static_cast<std::size_t>(k)]);
        } catch (const std::domain_error&) {
            degenerate = true;
            break;
        }
        if (std::abs(d) <= slope_floor) {
            degenerate = true;
            break;
        }
    }

    if (!degenerate) {
        double lo = ip_c.lo, hi = ip_c.hi;
        for (int k = depth - 1; k >= 0; --k) {
            const double slope = m.derivative(path[static_cast<std::size_t>(k)]);
            const double xk = path[static_cast<std::size_t>(k)];
            const double xk1 = path[static_cast<std::size_t>(k + 1)];
            const double a = xk + (lo - xk1) / slope;
            const double b = xk + (hi - xk1) / slope;
            lo = std::min(a, b);
            hi = std::max(a, b);
        }
        return Interval{lo, hi};
    }

    // fallback: exact bracketed solves of f^depth(x) = endpoint on each
    // monotone side of x_ic
    const Interval dom = m.domain();
    const double ori = m.iterate_derivative(x_ic, depth);
    const double left_target = ori > 0.0 ? ip_c.lo : ip_c.hi;
    const double right_target = ori > 0.0 ? ip_c.hi : ip_c.lo;
    const auto solve_side = [&](double target, int dir) -> double {
        const auto g = [&](double x) { return m.iterate(x, depth) - target; };
        const auto root =
            scan_outward_root(g, x_ic, dir, dom.lo, dom.hi, 1e-14 * std::max(1.0, m.scale()));
        if (!root)
            throw numeric_error("linearized_backpull: exact fallback found no crossing");
        return *root;
    };
    const double lo = solve_side(left_target, -1);
    const double hi = solve_side(right_target, +1);
    return Interval{std::min(lo, hi), std::max(lo, hi)};
}

namespace {

struct SegmentEnds {
    bool lo_is_extremum = false;
    bool hi_is_extremum = false;
    Extremum lo_ext{};
    Extremum hi_ext{};
};

SegmentEnds classify_segment_ends(const ExtremaTable& table, int j) {
    SegmentEnds ends;
    const auto& e = table.entries();
    if (j > 0) {
        ends.lo_is_extremum = true;
        ends.lo_ext = e[static_cast<std::size_t>(j - 1)];
    }
    if (j < static_cast<int>(e.size())) {
        ends.hi_is_extremum = true;
        ends.hi_ext = e[static_cast<std::size_t>(j)];
    }
    return ends;
}

} // namespace

std::optional<CaptureSubinterval> compute_W_qij(const MapFamily& m, int q,
                                                const ExtremaTable& table,
                                                const SegmentModel& model,
                                                const CaptureIntervalSet& captures, int i,
                                                int j, const CaptureOptions& opts) {
    const Segment& seg = model.segments.at(static_cast<std::size_t>(j));
    const Interval band = captures.intervals.at(static_cast<std::size_t>(i));
    const double tol = opts.tol_root * std::max(1.0, m.scale());

    const bool increasing = seg.y_hi > seg.y_lo;
    const double y_enter = increasing ? seg.y_lo : seg.y_hi; // smaller ordinate
    const double y_leave = increasing ? seg.y_hi : seg.y_lo;
    if (y_enter >= band.hi - tol || y_leave <= band.lo + tol) return std::nullopt;

    const auto crossing = [&](double level) -> double {
        const auto sr = solve_in_segment(m, q, seg, level, opts.tol_root);
        if (!sr)
            throw numeric_error("compute_W_qij: inconsistent case, ordinates straddle a "
                                "band endpoint but no crossing refines (near-tangency)");
        return sr->root;
    };

    // On a monotone branch the preimage of the open band is one interval,
    // bounded by a refined crossing where the branch passes through a band
    // endpoint and by the segment end where it does not.
    double piece_lo, piece_hi;
    int n_crossings = 0;
    if (increasing) {
        if (seg.y_lo < band.lo) {
            piece_lo = crossing(band.lo);
            ++n_crossings;
        } else {
            piece_lo = seg.x_lo;
        }
        if (seg.y_hi > band.hi) {
            piece_hi = crossing(band.hi);
            ++n_crossings;
        } else {
            piece_hi = seg.x_hi;
        }
    } else {
        if (seg.y_lo > band.hi) {
            piece_lo = crossing(band.hi);
            ++n_crossings;
        } else {
            piece_lo = seg.x_lo;
        }
        if (seg.y_hi < band.lo) {
            piece_hi = crossing(band.lo);
            ++n_crossings;
        } else {
            piece_hi = seg.x_hi;
        }
    }
    if (!(piece_lo < piece_hi)) return std::nullopt;

    CaptureSubinterval w;
    w.interval = Interval{piece_lo, piece_hi};
    w.orbit_index = i;
    w.partition_index = j;
    w.q = q;
    w.kind = CaptureCase::monotone;

    if (n_crossings < 2) {
        // a segment end bounds the piece; the case is critical when that end
        // is an extremum whose ordinate lies strictly inside the band
        const SegmentEnds ends = classify_segment_ends(table, j);
        const Extremum* bounding = nullptr;
        if (piece_lo == seg.x_lo && ends.lo_is_extremum &&
            band.lo + tol < ends.lo_ext.y && ends.lo_ext.y < band.hi - tol)
            bounding = &ends.lo_ext;
        else if (piece_hi == seg.x_hi && ends.hi_is_extremum &&
                 band.lo + tol < ends.hi_ext.y && ends.hi_ext.y < band.hi - tol)
            bounding = &ends.hi_ext;
        if (bounding != nullptr) {
            w.kind = CaptureCase::critical;
            w.extremum_x = bounding->x;
            w.depth = bounding->depth;
            if (captures.critical_index >= 0) {
                const Interval ip_c =
                    captures.intervals[static_cast<std::size_t>(captures.critical_index)];
                Interval bp = linearized_backpull(m, bounding->x, bounding->depth, ip_c,
                                                  opts.slope_floor);
                // clip to the region between the neighboring extrema of x_iC
                const auto& entries = table.entries();
                double clip_lo = m.domain().lo, clip_hi = m.domain().hi;
                for (const Extremum& e : entries) {
                    if (e.x < bounding->x) clip_lo = std::max(clip_lo, e.x);
                    if (e.x > bounding->x) {
                        clip_hi = e.x;
                        break;
                    }
                }
                bp.lo = std::max(bp.lo, clip_lo);
                bp.hi = std::min(bp.hi, clip_hi);
                w.backpull = bp;
            }
        }
    }
    return w;
}

CaptureSet assemble_W_R(const MapFamily& m, int q, const PeriodicOrbit& orbit,
                        const CaptureIntervalSet& captures, const CaptureOptions& opts) {
    const ExtremaTable table = build_extrema_table(m, q, ExtremaOptions{opts.tol_root, 1e-9});
    const SegmentModel model = build_segment_model(table, m);

    CaptureSet set;
    set.q = q;
    for (int i = 0; i < orbit.p; ++i) {
        for (int j = 0; j < static_cast<int>(model.segments.size()); ++j) {
            auto w = compute_W_qij(m, q, table, model, captures, i, j, opts);
            if (w) set.subintervals.push_back(std::move(*w));
        }
    }
    std::vector<Interval> pieces;
    pieces.reserve(set.subintervals.size());
    for (const CaptureSubinterval& w : set.subintervals) pieces.push_back(w.interval);
    set.merged = merge_intervals(std::move(pieces), 1e-15 * std::max(1.0, m.scale()));
    set.measure = total_measure(set.merged);
    return set;
}

ProbabilityReport probability(const CaptureSet& w, Interval domain, const CaptureSet* prev) {
    ProbabilityReport report;
    report.q = w.q;
    report.P_q = w.measure / domain.length();
    if (prev != nullptr) report.P_exact_q = report.P_q - prev->measure / domain.length();
    return report;
}

std::string capture_set_json(const CaptureSet& w, Interval domain, const CaptureSet* prev) {
    nlohmann::json j;
    j["q"] = w.q;
    j["P_q"] = w.measure / domain.length();
    if (prev != nullptr)
        j["P_exact_q"] = (w.measure - prev->measure) / domain.length();
    else
        j["P_exact_q"] = nullptr;
    j["measure"] = w.measure;
    nlohmann::json items = nlohmann::json::array();
    for (const CaptureSubinterval& s : w.subintervals) {
        items.push_back({{"lo", s.interval.lo},
                         {"hi", s.interval.hi},
                         {"i", s.orbit_index},
                         {"j", s.partition_index},
                         {"case", capture_case_name(s.kind)}});
    }
    j["intervals"] = items;
    return j.dump(2);
}

void write_capture_csv(std::ostream& os, const CaptureSet& w) {
    os << "lo,hi\n";
    char buf[96];
    for (const Interval& iv : w.merged) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", iv.lo, iv.hi);
        os << buf;
    }
}

} // namespace capmap
