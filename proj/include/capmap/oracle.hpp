#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capmap/intervals.hpp"
#include "capmap/map_family.hpp"
#include "capmap/orbit.hpp"

namespace capmap {

// Monte Carlo configuration. Sampling uses mt19937_64 streams with
// splitmix64-derived per-chunk seeds and an explicit 53-bit uniform double
// mapping, so results are bit-stable across platforms for a fixed seed.
struct McConfig {
    std::int64_t n_samples = 1000000;
    std::uint64_t rng_seed = 0xC0FFEE;
};

struct McResult {
    double estimate = 0.0;  // fraction entering I_P within <= q iterations
    double halfwidth = 0.0; // 3-sigma binomial half width
};

// Uniform samples on [a,b]; success = the orbit enters any I_Pi (open, with
// a tol_root cushion at the endpoints) within at most q iterations, the
// sample point itself counting as iteration zero.
McResult mc_capture_probability(const MapFamily& m, int q,
                                const CaptureIntervalSet& captures,
                                const McConfig& cfg = {});

// Brute-force reconstruction of W_R: classifies `resolution` uniform grid
// points and returns maximal runs of captured points as intervals.
std::vector<Interval> grid_capture_set(const MapFamily& m, int q,
                                       const CaptureIntervalSet& captures,
                                       std::int64_t resolution);

struct VerificationReport {
    int q = 0;
    double analytic_P = 0.0;
    double mc_estimate = 0.0;
    double mc_halfwidth = 0.0;
    double grid_symmdiff = 0.0;
    bool pass = false;
};

std::string verification_report_json(const VerificationReport& report);

} // namespace capmap
