#include "capmap/extrema.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "capmap/errors.hpp"
#include "capmap/root_finding.hpp"

namespace capmap {

namespace {

void format_double(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

} // namespace

ExtremaTable::ExtremaTable(int q, Interval domain, std::vector<Extremum> entries)
    : q_(q), domain_(domain), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Extremum& a, const Extremum& b) { return a.x < b.x; });
    for (std::size_t k = 1; k < entries_.size(); ++k) {
        if (!(entries_[k - 1].x < entries_[k].x))
            throw tangency_error("ExtremaTable: duplicate abscissas (tangency)");
        if (entries_[k - 1].kind == entries_[k].kind)
            throw numeric_error("ExtremaTable: kinds do not alternate");
    }
}

ExtremaTable extrema_base(const MapFamily& m) {
    const double c = m.critical();
    Extremum e{c, m.eval(c), ExtremumKind::maximum, 0};
    return ExtremaTable(1, m.domain(), {e});
}

ExtremaTable extrema_step(const MapFamily& m, const ExtremaTable& prev,
                          const ExtremaOptions& opts) {
    const int q = prev.q() + 1;
    const double c = m.critical();
    const double cushion = opts.tangency_cushion * std::max(1.0, m.scale());
    const double f_of_c = m.eval(c);

    std::vector<Extremum> entries;
    entries.reserve(2 * prev.size() + 1);

    // carried-over extrema: same abscissa and depth, ordinate advanced by one
    // application of f. The kind flips where f is decreasing at the previous
    // ordinate; an ordinate at level C (supercycle revisit) always lands just
    // under f(C) on both sides, so those become maxima.
    for (const Extremum& e : prev.entries()) {
        Extremum n = e;
        n.y = m.eval(e.y);
        if (std::abs(e.y - c) <= cushion)
            n.kind = ExtremumKind::maximum;
        else if (e.y > c)
            n.kind = e.kind == ExtremumKind::maximum ? ExtremumKind::minimum
                                                     : ExtremumKind::maximum;
        entries.push_back(n);
    }

    // new extrema at the solutions of f^{q-1}(x) = C, one per previous-model
    // segment whose ordinate span contains C with margin; each is a maximum
    // with ordinate f(C)
    const SegmentModel model = build_segment_model(prev, m);
    for (const Segment& seg : model.segments) {
        if (!(seg.y_min() + cushion < c && c < seg.y_max() - cushion)) continue;
        const auto sr = solve_in_segment(m, prev.q(), seg, c, opts.tol_root);
        if (!sr) continue;
        entries.push_back(Extremum{sr->root, f_of_c, ExtremumKind::maximum, q - 1});
    }

    std::sort(entries.begin(), entries.end(),
              [](const Extremum& a, const Extremum& b) { return a.x < b.x; });
    const double dup_tol = opts.tol_root * std::max(1.0, m.scale());
    for (std::size_t k = 1; k < entries.size(); ++k) {
        if (entries[k].x - entries[k - 1].x < dup_tol)
            throw tangency_error("extrema_step: refined roots collide (tangency at this parameter)");
    }
    return ExtremaTable(q, m.domain(), std::move(entries));
}

ExtremaTable build_extrema_table(const MapFamily& m, int q, const ExtremaOptions& opts) {
    if (q < 1) throw std::invalid_argument("build_extrema_table: q >= 1");
    ExtremaTable t = extrema_base(m);
    for (int k = 2; k <= q; ++k) t = extrema_step(m, t, opts);
    return t;
}

std::vector<Interval> monotonicity_partition(const ExtremaTable& table) {
    std::vector<Interval> parts;
    parts.reserve(table.size() + 1);
    double lo = table.domain().lo;
    for (const Extremum& e : table.entries()) {
        parts.push_back(Interval{lo, e.x});
        lo = e.x;
    }
    parts.push_back(Interval{lo, table.domain().hi});
    return parts;
}

SegmentModel build_segment_model(const ExtremaTable& table, const MapFamily& m) {
    SegmentModel model;
    model.q = table.q();
    model.segments.reserve(table.size() + 1);
    double x_lo = table.domain().lo;
    double y_lo = m.iterate(x_lo, table.q());
    for (const Extremum& e : table.entries()) {
        model.segments.push_back(Segment{x_lo, y_lo, e.x, e.y});
        x_lo = e.x;
        y_lo = e.y;
    }
    const double b = table.domain().hi;
    model.segments.push_back(Segment{x_lo, y_lo, b, m.iterate(b, table.q())});
    return model;
}

std::optional<SegmentRoot> solve_in_segment(const MapFamily& m, int q, const Segment& seg,
                                            double y_target, double tol_root) {
    if (!(seg.y_min() < y_target && y_target < seg.y_max())) return std::nullopt;

    const double seed = seg.x_lo + (y_target - seg.y_lo) / (seg.y_hi - seg.y_lo) * seg.width();
    const auto g = [&](double x) { return m.iterate(x, q) - y_target; };
    const double fa = g(seg.x_lo);
    const double fb = g(seg.x_hi);
    if ((fa < 0.0) == (fb < 0.0)) return std::nullopt; // grazing level, no true crossing
    const double tol = tol_root * std::max(1.0, m.scale());
    const double root =
        refine_root(g, [&](double x) { return m.iterate_derivative(x, q); },
                    seg.x_lo, seg.x_hi, fa, fb, seed, tol);
    return SegmentRoot{seed, root};
}

double segment_error_bound(const MapFamily& m, int q, const Segment& seg) {
    if (!m.smooth())
        throw std::domain_error("segment_error_bound: smooth families only");
    const double eps = 1e-12 * std::max(1.0, m.scale());
    double a = seg.x_lo + eps, b = seg.x_hi - eps;
    const auto d2_at = [&](double x) {
        double v, d1, d2;
        m.iterate_jet2(x, q, v, d1, d2);
        return d2;
    };
    double ga = d2_at(a), gb = d2_at(b);
    if ((ga < 0.0) == (gb < 0.0))
        throw no_inflection_error("segment_error_bound: f^q'' has no sign change in segment");
    const double x_inf = bisect_root(d2_at, a, b, ga, gb);

    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, m.scale());
    const Interval dom = m.domain();
    const double xp = std::min(x_inf + h, dom.hi);
    const double xm = std::max(x_inf - h, dom.lo);
    const double d3 = (d2_at(xp) - d2_at(xm)) / (xp - xm);

    const double cell = m.scale() / std::pow(2.0, static_cast<double>(q));
    return std::abs(d3) / 6.0 * cell * cell * cell;
}

void write_extrema_csv(std::ostream& os, const ExtremaTable& table) {
    os << "q,x,y,kind,depth\n";
    for (const Extremum& e : table.entries()) {
        os << table.q() << ',';
        format_double(os, e.x);
        os << ',';
        format_double(os, e.y);
        os << ',' << (e.kind == ExtremumKind::maximum ? "max" : "min") << ',' << e.depth
           << '\n';
    }
}

void write_segments_csv(std::ostream& os, const SegmentModel& model, const MapFamily& m) {
    os << "x_lo,y_lo,x_hi,y_hi,slope,intercept,error_bound\n";
    for (const Segment& seg : model.segments) {
        double bound = std::numeric_limits<double>::quiet_NaN();
        try {
            bound = segment_error_bound(m, model.q, seg);
        } catch (const no_inflection_error&) {
        } catch (const std::domain_error&) {
        }
        format_double(os, seg.x_lo);
        os << ',';
        format_double(os, seg.y_lo);
        os << ',';
        format_double(os, seg.x_hi);
        os << ',';
        format_double(os, seg.y_hi);
        os << ',';
        format_double(os, seg.slope());
        os << ',';
        format_double(os, seg.intercept());
        os << ',';
        format_double(os, bound);
        os << '\n';
    }
}

} // namespace capmap
