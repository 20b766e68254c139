#include "capmap/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "capmap/errors.hpp"
#include "capmap/root_finding.hpp"

namespace capmap {

namespace {

// parameter-dependent evaluation for the built-in families, cheap enough to
// call inside the r-solve without constructing a validated MapFamily
double family_eval(Family family, double r, double x) {
    switch (family) {
        case Family::logistic: return r * x * (1.0 - x);
        case Family::tent: return x <= 0.5 ? r * x : r * (1.0 - x);
        case Family::custom: break;
    }
    throw std::invalid_argument("find_supercycle_parameter: built-in families only");
}

double supercycle_residual(Family family, double r, int p) {
    double x = 0.5;
    for (int k = 0; k < p; ++k) x = family_eval(family, r, x);
    return x - 0.5;
}

// Newton polish of f^p(x) - x from a near-recurrent seed, confined to a
// small neighborhood. Returns nullopt when the iteration walks away.
std::optional<double> polish_periodic_point(const MapFamily& m, double seed, int p,
                                            double tol) {
    const double radius = 1e-4 * m.scale();
    const Interval dom = m.domain();
    double x = seed;
    for (int it = 0; it < 80; ++it) {
        const double g = m.iterate(x, p) - x;
        if (std::abs(g) <= tol) return x;
        double d = m.iterate_derivative(x, p) - 1.0;
        if (d == 0.0 || !std::isfinite(d)) d = -1.0;
        double next = x - g / d;
        if (next < dom.lo) next = dom.lo;
        if (next > dom.hi) next = dom.hi;
        if (std::abs(next - seed) > radius) return std::nullopt;
        if (next == x) break;
        x = next;
    }
    return std::abs(m.iterate(x, p) - x) <= 10.0 * tol ? std::optional<double>(x)
                                                       : std::nullopt;
}

} // namespace

std::optional<PeriodicOrbit> find_stable_orbit(const MapFamily& m, int p_max,
                                               double tol_orbit) {
    OrbitOptions opts;
    opts.tol_orbit = tol_orbit;
    return find_stable_orbit(m, p_max, opts);
}

std::optional<PeriodicOrbit> find_stable_orbit(const MapFamily& m, int p_max,
                                               const OrbitOptions& opts) {
    double x = m.critical();
    for (int k = 0; k < opts.burn_in; ++k) x = m.iterate(x, 1);

    bool detected_any = false;
    for (int p = 1; p <= p_max; ++p) {
        if (std::abs(m.iterate(x, p) - x) >= opts.recurrence_tol) continue;
        detected_any = true;

        std::vector<double> points;
        points.reserve(p);
        bool ok = true;
        double seed = x;
        for (int i = 0; i < p; ++i) {
            const auto s = polish_periodic_point(m, seed, p, opts.tol_orbit);
            if (!s) {
                ok = false;
                break;
            }
            points.push_back(*s);
            seed = m.iterate(*s, 1);
        }
        if (!ok) continue;

        double mult = 1.0;
        for (double s : points) {
            double d;
            try {
                d = m.derivative(s);
            } catch (const std::domain_error&) {
                d = 0.0; // tent kink on the orbit: treat as a supercycle factor
            }
            mult *= d;
        }
        if (!(std::abs(mult) < 1.0)) continue; // unstable, keep scanning

        // rotate so points[0] is nearest C
        int i0 = 0;
        for (int i = 1; i < p; ++i)
            if (std::abs(points[i] - m.critical()) < std::abs(points[i0] - m.critical()))
                i0 = i;
        std::rotate(points.begin(), points.begin() + i0, points.end());

        PeriodicOrbit orbit;
        orbit.p = p;
        orbit.points = std::move(points);
        orbit.multiplier = mult;
        return orbit;
    }
    if (detected_any)
        throw polish_error("find_stable_orbit: recurrence detected but polishing diverged");
    return std::nullopt;
}

double find_supercycle_parameter(Family family, int p, double r_lo, double r_hi) {
    if (p < 1) throw std::invalid_argument("find_supercycle_parameter: p >= 1");
    if (!(r_lo < r_hi)) throw std::invalid_argument("find_supercycle_parameter: empty bracket");

    const auto residual = [&](double r) { return supercycle_residual(family, r, p); };

    const int n_scan = 4096;
    std::vector<double> roots;
    double r_prev = r_lo;
    double g_prev = residual(r_prev);
    for (int k = 1; k <= n_scan; ++k) {
        const double r = r_lo + (r_hi - r_lo) * static_cast<double>(k) / n_scan;
        const double g = residual(r);
        if (g == 0.0) {
            roots.push_back(r);
        } else if ((g < 0.0) != (g_prev < 0.0)) {
            roots.push_back(bisect_root(residual, r_prev, r, g_prev, g));
        }
        r_prev = r;
        g_prev = g;
    }
    if (roots.empty())
        throw bracket_error("find_supercycle_parameter: residual has no sign change in bracket");

    // secant polish, keeping the best residual
    for (double& r : roots) {
        double r0 = r, r1 = r * (1.0 + 4e-16);
        double g0 = residual(r0), g1 = residual(r1);
        for (int it = 0; it < 8 && g1 != g0; ++it) {
            const double r2 = r1 - g1 * (r1 - r0) / (g1 - g0);
            if (!std::isfinite(r2) || r2 < r_lo || r2 > r_hi) break;
            r0 = r1;
            g0 = g1;
            r1 = r2;
            g1 = residual(r1);
        }
        if (std::abs(g1) < std::abs(residual(r))) r = r1;
    }

    // reject solutions whose minimal period properly divides p
    std::vector<double> minimal;
    bool saw_divisor_root = false;
    for (double r : roots) {
        bool divisor = false;
        for (int d = 1; d < p; ++d) {
            if (p % d != 0) continue;
            double c = 0.5;
            for (int k = 0; k < d; ++k) c = family_eval(family, r, c);
            if (std::abs(c - 0.5) < 1e-6) {
                divisor = true;
                break;
            }
        }
        if (divisor)
            saw_divisor_root = true;
        else
            minimal.push_back(r);
    }
    if (minimal.empty()) {
        if (saw_divisor_root)
            throw wrong_period_error("find_supercycle_parameter: minimal period divides p");
        throw bracket_error("find_supercycle_parameter: no root in bracket");
    }
    if (minimal.size() > 1)
        throw bracket_error("find_supercycle_parameter: several minimal-period solutions in bracket");

    const double r = minimal.front();
    if (std::abs(residual(r)) > 1e-13)
        throw numeric_error("find_supercycle_parameter: residual above 1e-13 after polishing");
    return r;
}

double find_saddle_partner(const MapFamily& m, const PeriodicOrbit& orbit, int i) {
    const double s = orbit.points.at(static_cast<std::size_t>(i));
    const int p = orbit.p;
    const Interval dom = m.domain();
    const auto g = [&](double x) { return m.iterate(x, p) - x; };
    const double h0 = 1e-12 * std::max(1.0, m.scale());

    double best = 0.0;
    bool found = false;
    for (int dir : {-1, +1}) {
        double start = s;
        for (int skip = 0; skip < 16; ++skip) {
            const auto root = scan_outward_root(g, start, dir, dom.lo, dom.hi, h0);
            if (!root) break;
            if (std::abs(m.iterate_derivative(*root, p)) > 1.0) {
                if (!found || std::abs(*root - s) < std::abs(best - s)) {
                    best = *root;
                    found = true;
                }
                break;
            }
            start = *root; // stable root, keep going outward
        }
    }
    if (!found)
        throw numeric_error("find_saddle_partner: no unstable fixed point of f^p on either side");
    return best;
}

double find_companion(const MapFamily& m, const PeriodicOrbit& orbit, int i) {
    const double s = orbit.points.at(static_cast<std::size_t>(i));
    const double u = orbit.saddles.at(static_cast<std::size_t>(i));
    const int p = orbit.p;
    const Interval dom = m.domain();
    const auto g = [&](double x) { return m.iterate(x, p) - u; };
    const int dir = u > s ? -1 : +1; // opposite side of S_i from U_i
    const double h0 = 1e-12 * std::max(1.0, m.scale());
    const auto root = scan_outward_root(g, s, dir, dom.lo, dom.hi, h0);
    if (!root)
        throw numeric_error("find_companion: no intersection of f^p with the U_i line "
                            "on the opposite side");
    return *root;
}

void complete_orbit(const MapFamily& m, PeriodicOrbit& orbit) {
    orbit.saddles.assign(orbit.points.size(), 0.0);
    orbit.companions.assign(orbit.points.size(), 0.0);
    for (int i = 0; i < orbit.p; ++i)
        orbit.saddles[static_cast<std::size_t>(i)] = find_saddle_partner(m, orbit, i);
    for (int i = 0; i < orbit.p; ++i)
        orbit.companions[static_cast<std::size_t>(i)] = find_companion(m, orbit, i);
}

CaptureIntervalSet capture_intervals(const MapFamily& m, const PeriodicOrbit& orbit,
                                     CompanionMode mode) {
    PeriodicOrbit filled = orbit;
    if (filled.saddles.empty() || filled.companions.empty()) complete_orbit(m, filled);

    CaptureIntervalSet set;
    set.intervals.reserve(filled.points.size());
    for (int i = 0; i < filled.p; ++i) {
        const double s = filled.points[static_cast<std::size_t>(i)];
        const double u = filled.saddles[static_cast<std::size_t>(i)];
        double x_other = filled.companions[static_cast<std::size_t>(i)];
        if (mode == CompanionMode::companion_preimage) {
            // text reading: x_i' solves f^p(x) = U_i' nearest S_i on the U_i' side
            const double up = x_other;
            const int dir = up > s ? +1 : -1;
            const auto g = [&](double x) { return m.iterate(x, orbit.p) - up; };
            const auto root = scan_outward_root(g, s, dir, m.domain().lo, m.domain().hi,
                                                1e-12 * std::max(1.0, m.scale()));
            if (!root)
                throw numeric_error("capture_intervals: no preimage of U_i' on its side");
            x_other = *root;
        }
        set.intervals.push_back(Interval{std::min(u, x_other), std::max(u, x_other)});
    }

    // pairwise disjoint (shared endpoints are fine, the intervals are open)
    std::vector<Interval> sorted = set.intervals;
    std::sort(sorted.begin(), sorted.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k].lo < sorted[k - 1].hi - 1e-15 * m.scale())
            throw overlap_error("capture_intervals: intervals overlap; tol_orbit too loose "
                                "or companion misidentified");
    }

    for (std::size_t i = 0; i < set.intervals.size(); ++i) {
        if (set.intervals[i].contains_strict(m.critical())) {
            set.critical_index = static_cast<int>(i);
            break;
        }
    }
    set.measure = total_measure(set.intervals);
    return set;
}

std::vector<double> attractor_samples(const MapFamily& m, int burn_in, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    double x = m.critical();
    for (int k = 0; k < burn_in; ++k) x = m.iterate(x, 1);
    for (int k = 0; k < count; ++k) {
        x = m.iterate(x, 1);
        out.push_back(x);
    }
    return out;
}

std::string orbit_report_json(const MapFamily& m, const PeriodicOrbit& orbit,
                              const CaptureIntervalSet& captures) {
    nlohmann::json j;
    j["p"] = orbit.p;
    j["r"] = m.r();
    j["points"] = orbit.points;
    j["multiplier"] = orbit.multiplier;
    j["saddles"] = orbit.saddles;
    j["companions"] = orbit.companions;
    nlohmann::json caps = nlohmann::json::array();
    for (const Interval& iv : captures.intervals) caps.push_back({iv.lo, iv.hi});
    j["capture_intervals"] = caps;
    j["critical_index"] = captures.critical_index;
    return j.dump(2);
}

} // namespace capmap
