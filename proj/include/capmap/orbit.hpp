#pragma once

#include <optional>
#include <string>
#include <vector>

#include "capmap/intervals.hpp"
#include "capmap/map_family.hpp"

namespace capmap {

// A stable p-periodic orbit together with its saddle partners U_i and
// companion points U_i'. points[0] is the orbit point nearest C and
// f(points[i]) = points[i+1 mod p]; saddles/companions are aligned with
// points (empty until filled by complete_orbit or the per-index finders).
struct PeriodicOrbit {
    int p = 0;
    std::vector<double> points;
    double multiplier = 0.0; // product of f'(S_i); |multiplier| < 1
    std::vector<double> saddles;
    std::vector<double> companions;
};

struct OrbitOptions {
    double tol_orbit = 1e-11;
    double recurrence_tol = 1e-8; // near-recurrence detection before polishing
    int burn_in = 10000;
};

// Iterates the critical orbit (Singer: it is attracted to the unique stable
// orbit when one exists), detects the minimal period <= p_max by
// near-recurrence and polishes each point by root-finding on f^p(x) - x.
// Returns nullopt when no stable orbit of period <= p_max is detected.
std::optional<PeriodicOrbit> find_stable_orbit(const MapFamily& m, int p_max,
                                               double tol_orbit = 1e-11);
std::optional<PeriodicOrbit> find_stable_orbit(const MapFamily& m, int p_max,
                                               const OrbitOptions& opts);

// Solves f^p(C; r) = C for r inside [r_lo, r_hi] (bisection on a scanned
// sign change, then secant polish). Throws bracket_error if the bracket has
// no sign change or several minimal-period-p solutions, wrong_period_error
// if the root's minimal period properly divides p.
double find_supercycle_parameter(Family family, int p, double r_lo, double r_hi);

// Nearest solution of f^p(x) = x to S_i with |d f^p/dx| > 1, scanning
// outward from S_i on both sides and skipping stable roots.
double find_saddle_partner(const MapFamily& m, const PeriodicOrbit& orbit, int i);

// Nearest solution of f^p(x) = U_i on the opposite side of S_i from U_i.
double find_companion(const MapFamily& m, const PeriodicOrbit& orbit, int i);

// Fills saddles and companions for every index.
void complete_orbit(const MapFamily& m, PeriodicOrbit& orbit);

// How the endpoint x_i' of a capture interval is read. The figure reading
// takes the abscissas of U_i and U_i' themselves; the text reading takes
// x_i' as the preimage of U_i' under f^p nearest S_i (exposed for
// comparison, not validated against the source material).
enum class CompanionMode { saddle_abscissas, companion_preimage };

struct CaptureIntervalSet {
    std::vector<Interval> intervals; // I_Pi, aligned with orbit.points
    int critical_index = -1;         // i with C inside intervals[i], -1 if none
    double measure = 0.0;            // sum of lengths
};

// Builds I_Pi from U_i and U_i' (throws overlap_error if two intervals
// intersect) and locates the interval containing C.
CaptureIntervalSet capture_intervals(const MapFamily& m, const PeriodicOrbit& orbit,
                                     CompanionMode mode = CompanionMode::saddle_abscissas);

// Post-burn-in samples of the attractor at one parameter value, for
// bifurcation-diagram data files.
std::vector<double> attractor_samples(const MapFamily& m, int burn_in, int count);

// Orbit report: {p, r, points, multiplier, saddles, companions,
// capture_intervals, critical_index}
std::string orbit_report_json(const MapFamily& m, const PeriodicOrbit& orbit,
                              const CaptureIntervalSet& captures);

} // namespace capmap
