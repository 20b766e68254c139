#include "capmap/oracle.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

namespace capmap {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// uniform double in [0,1) from the top 53 bits, independent of the standard
// library's distribution internals
double uniform53(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

bool enters_capture(const MapFamily& m, double x, int q,
                    const std::vector<Interval>& bands, double cushion) {
    for (int l = 0; l <= q; ++l) {
        for (const Interval& b : bands) {
            if (x > b.lo + cushion && x < b.hi - cushion) return true;
        }
        if (l < q) x = m.iterate(x, 1);
    }
    return false;
}

} // namespace

McResult mc_capture_probability(const MapFamily& m, int q,
                                const CaptureIntervalSet& captures, const McConfig& cfg) {
    if (cfg.n_samples < 1000)
        throw std::invalid_argument("mc_capture_probability: n_samples >= 1000");
    const Interval dom = m.domain();
    const double cushion = 1e-12 * std::max(1.0, m.scale());

    const std::int64_t chunk = 65536;
    std::int64_t hits = 0;
    std::uint64_t seq = cfg.rng_seed;
    for (std::int64_t done = 0; done < cfg.n_samples; done += chunk) {
        const std::int64_t n = std::min(chunk, cfg.n_samples - done);
        std::mt19937_64 gen(splitmix64(seq));
        for (std::int64_t k = 0; k < n; ++k) {
            const double x = dom.lo + dom.length() * uniform53(gen);
            if (enters_capture(m, x, q, captures.intervals, cushion)) ++hits;
        }
    }
    const double est = static_cast<double>(hits) / static_cast<double>(cfg.n_samples);
    const double sigma = std::sqrt(est * (1.0 - est) / static_cast<double>(cfg.n_samples));
    return McResult{est, 3.0 * sigma};
}

std::vector<Interval> grid_capture_set(const MapFamily& m, int q,
                                       const CaptureIntervalSet& captures,
                                       std::int64_t resolution) {
    if (resolution < 2)
        throw std::invalid_argument("grid_capture_set: resolution >= 2");
    const Interval dom = m.domain();
    const double cushion = 1e-12 * std::max(1.0, m.scale());
    const double step = dom.length() / static_cast<double>(resolution - 1);

    std::vector<Interval> runs;
    bool in_run = false;
    double run_start = 0.0, last_captured = 0.0;
    for (std::int64_t k = 0; k < resolution; ++k) {
        const double x = dom.lo + step * static_cast<double>(k);
        if (enters_capture(m, x, q, captures.intervals, cushion)) {
            if (!in_run) {
                in_run = true;
                run_start = x;
            }
            last_captured = x;
        } else if (in_run) {
            runs.push_back(Interval{run_start, last_captured});
            in_run = false;
        }
    }
    if (in_run) runs.push_back(Interval{run_start, last_captured});
    return runs;
}

std::string verification_report_json(const VerificationReport& report) {
    nlohmann::json j;
    j["q"] = report.q;
    j["analytic_P"] = report.analytic_P;
    j["mc_estimate"] = report.mc_estimate;
    j["mc_halfwidth"] = report.mc_halfwidth;
    j["grid_symmdiff"] = report.grid_symmdiff;
    j["pass"] = report.pass;
    return j.dump(2);
}

} // namespace capmap
