#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "capmap/extrema.hpp"
#include "capmap/intervals.hpp"
#include "capmap/map_family.hpp"
#include "capmap/orbit.hpp"

namespace capmap {

enum class CaptureCase { monotone, critical };

const char* capture_case_name(CaptureCase c);

// One subinterval W_qij of the j-th monotonicity interval whose points reach
// I_Pi within at most q iterations. In the monotone case both ends are
// refined crossings of f^q with the endpoints of I_Pi; in the critical case
// one end is the extremum abscissa x_iC whose ordinate lies inside I_Pi
// (half-open there) and the back-pull approximation of the piece is kept
// alongside for validation.
struct CaptureSubinterval {
    Interval interval;
    int orbit_index = -1;     // i
    int partition_index = -1; // j
    CaptureCase kind = CaptureCase::monotone;
    int q = 0;
    // critical case provenance
    double extremum_x = std::numeric_limits<double>::quiet_NaN();
    int depth = -1;
    Interval backpull{}; // linearized back-pull I_iC (both sides of x_iC)
};

struct CaptureSet {
    int q = 0;
    std::vector<CaptureSubinterval> subintervals;
    std::vector<Interval> merged; // disjoint, ascending
    double measure = 0.0;         // total length of merged
};

struct CaptureOptions {
    double tol_root = 1e-12;
    double slope_floor = 1e-8; // below this |f'| the back-pull falls back to
                               // exact bracketed solves
};

// Tangent-line maps L_{i,k} of slope f'(x_{i,k}) through (x_{i,k}, x_{i,k+1})
// along the forward path x_{i,k} = f^k(x_iC), inverted in reverse order and
// applied to I_P(i,C); returns the pulled-back interval around x_iC. Any
// |f'| <= slope_floor on the path switches that side to an exact bracketed
// solve of f^depth(x) = endpoint.
Interval linearized_backpull(const MapFamily& m, double x_ic, int depth,
                             Interval ip_c, double slope_floor = 1e-8);

// The W_qij piece for capture interval i on monotonicity interval j, or
// nullopt when the range of f^q there misses I_Pi entirely.
std::optional<CaptureSubinterval> compute_W_qij(
    const MapFamily& m, int q, const ExtremaTable& table, const SegmentModel& model,
    const CaptureIntervalSet& captures, int i, int j, const CaptureOptions& opts = {});

// Union over all (i, j): collects every subinterval, merges overlaps and
// measures the result.
CaptureSet assemble_W_R(const MapFamily& m, int q, const PeriodicOrbit& orbit,
                        const CaptureIntervalSet& captures,
                        const CaptureOptions& opts = {});

struct ProbabilityReport {
    int q = 0;
    double P_q = 0.0;       // measure(W_R)/(b-a)
    double P_exact_q = std::numeric_limits<double>::quiet_NaN(); // P_q - P_{q-1}
    std::optional<double> mc_estimate;
    std::optional<double> mc_halfwidth;
};

// P_q from the capture-set measure; with a previous-q set supplied the
// exact-q probability P_q - P_{q-1} is filled in.
ProbabilityReport probability(const CaptureSet& w, Interval domain,
                              const CaptureSet* prev = nullptr);

// {q, P_q, P_exact_q, measure, intervals:[{lo,hi,i,j,case}...]}
std::string capture_set_json(const CaptureSet& w, Interval domain,
                             const CaptureSet* prev = nullptr);
// one row per merged interval: "lo,hi"; subinterval rows: "lo,hi,i,j,case"
void write_capture_csv(std::ostream& os, const CaptureSet& w);

} // namespace capmap
