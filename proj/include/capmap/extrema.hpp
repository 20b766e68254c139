#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "capmap/intervals.hpp"
#include "capmap/map_family.hpp"

namespace capmap {

enum class ExtremumKind { maximum, minimum };

struct Extremum {
    double x = 0.0;  // abscissa
    double y = 0.0;  // ordinate f^q(x)
    ExtremumKind kind = ExtremumKind::maximum;
    int depth = 0;   // the i with f^i(x) = C
};

struct ExtremaOptions {
    double tol_root = 1e-12;        // absolute residual for refined roots
    double tangency_cushion = 1e-9; // level-vs-endpoint ordinate margin below
                                    // which a segment crossing is treated as
                                    // tangent and skipped
};

// Sorted extrema of f^q. Abscissas are strictly increasing and kinds
// alternate strictly; violation of either aborts construction.
class ExtremaTable {
public:
    ExtremaTable(int q, Interval domain, std::vector<Extremum> entries);

    int q() const { return q_; }
    Interval domain() const { return domain_; }
    const std::vector<Extremum>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    int q_;
    Interval domain_;
    std::vector<Extremum> entries_;
};

// Base case: the single extremum (C, f(C), max, depth 0) of f^1.
ExtremaTable extrema_base(const MapFamily& m);

// One recursion step q-1 -> q: carried-over extrema keep their abscissa and
// depth with the ordinate advanced by one application of f; new extrema
// appear at the solutions of f^{q-1}(x) = C, seeded from the previous
// segment model and refined inside their monotone segment. Throws
// tangency_error when two refined roots collide within tol_root.
ExtremaTable extrema_step(const MapFamily& m, const ExtremaTable& prev,
                          const ExtremaOptions& opts = {});

ExtremaTable build_extrema_table(const MapFamily& m, int q,
                                 const ExtremaOptions& opts = {});

// Closed intervals [q_j, q_{j+1}] splitting [a,b] at the extrema; f^q is
// monotone inside each.
std::vector<Interval> monotonicity_partition(const ExtremaTable& table);

struct Segment {
    double x_lo = 0.0, y_lo = 0.0;
    double x_hi = 0.0, y_hi = 0.0;

    double slope() const { return (y_hi - y_lo) / (x_hi - x_lo); }
    double intercept() const { return y_lo - slope() * x_lo; }
    double width() const { return x_hi - x_lo; }
    double y_min() const { return y_lo < y_hi ? y_lo : y_hi; }
    double y_max() const { return y_lo < y_hi ? y_hi : y_lo; }
};

// One chord per monotonicity interval, joining (q_j, f^q(q_j)) to
// (q_{j+1}, f^q(q_{j+1})); the boundary ordinates f^q(a), f^q(b) are
// computed directly.
struct SegmentModel {
    int q = 0;
    std::vector<Segment> segments;
};

SegmentModel build_segment_model(const ExtremaTable& table, const MapFamily& m);

struct SegmentRoot {
    double seed = 0.0; // chord intersection, the solver's starting point
    double root = 0.0; // refined solution of f^q(x) = y_target
};

// Solves f^q(x) = y_target inside one monotone segment: the seed comes from
// the chord, the root from safeguarded Newton/bisection confined to the
// segment. Returns nullopt when y_target is not strictly between the
// endpoint ordinates.
std::optional<SegmentRoot> solve_in_segment(const MapFamily& m, int q,
                                            const Segment& seg, double y_target,
                                            double tol_root = 1e-12);

// Taylor remainder bound (1/6)|f^q'''(x_inf)| ((b-a)/2^q)^3 at the segment's
// inflection point; f^q''' is a central difference of the chain-rule second
// derivative. Throws no_inflection_error when f^q'' has no sign change in
// the segment (boundary segments).
double segment_error_bound(const MapFamily& m, int q, const Segment& seg);

// CSV exports: "q,x,y,kind,depth" and "x_lo,y_lo,x_hi,y_hi,slope,intercept,error_bound"
void write_extrema_csv(std::ostream& os, const ExtremaTable& table);
void write_segments_csv(std::ostream& os, const SegmentModel& model, const MapFamily& m);

} // namespace capmap
