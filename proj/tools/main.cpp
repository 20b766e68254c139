// capmap: capture intervals, q-capture sets and convergence probabilities
// for stable periodic orbits of unimodal maps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "capmap/capture.hpp"
#include "capmap/errors.hpp"
#include "capmap/extrema.hpp"
#include "capmap/map_family.hpp"
#include "capmap/oracle.hpp"
#include "capmap/orbit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoAttractor = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerifyFail = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CommonOptions {
    std::string map_file;
    std::string family = "logistic";
    double r = 3.2;
    bool r_given = false;
    std::string format = "json";
    std::string out;
    double tol_root = 1e-12;
    double tol_orbit = 1e-11;
    std::uint64_t seed = 0xC0FFEE;

    capmap::MapFamily make_map() const {
        if (!map_file.empty()) return capmap::MapFamily::from_json_file(map_file);
        if (family == "logistic") return capmap::MapFamily::logistic(r);
        if (family == "tent") return capmap::MapFamily::tent(r);
        throw std::invalid_argument("--family must be logistic or tent (use --map for custom)");
    }

    void write(const std::string& text) const {
        if (out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + out);
        f << text;
    }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--map", o.map_file, "map specification JSON file");
    cmd->add_option("--family", o.family, "built-in family: logistic | tent");
    cmd->add_option("--r", o.r, "family parameter");
    cmd->add_option("--format", o.format, "output format: json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", o.out, "output file (stdout if omitted)");
    cmd->add_option("--tol-root", o.tol_root, "root-refinement residual tolerance");
    cmd->add_option("--tol-orbit", o.tol_orbit, "orbit residual tolerance");
    cmd->add_option("--seed", o.seed, "RNG seed for Monte Carlo verification");
}

struct OrbitPipeline {
    capmap::PeriodicOrbit orbit;
    capmap::CaptureIntervalSet captures;
};

std::optional<OrbitPipeline> run_orbit_pipeline(const capmap::MapFamily& map, int p_max,
                                                double tol_orbit) {
    auto orbit = capmap::find_stable_orbit(map, p_max, tol_orbit);
    if (!orbit) return std::nullopt;
    capmap::complete_orbit(map, *orbit);
    OrbitPipeline pipe;
    pipe.captures = capmap::capture_intervals(map, *orbit);
    pipe.orbit = std::move(*orbit);
    return pipe;
}

int cmd_orbit(const CommonOptions& o, int p_max) {
    const capmap::MapFamily map = o.make_map();
    const auto pipe = run_orbit_pipeline(map, p_max, o.tol_orbit);
    if (!pipe) {
        std::cerr << "no stable orbit of period <= " << p_max << " detected\n";
        return kExitNoAttractor;
    }
    if (o.format == "json") {
        o.write(capmap::orbit_report_json(map, pipe->orbit, pipe->captures) + "\n");
    } else {
        std::ostringstream os;
        os << "p,r,multiplier,critical_index,i,S,U,U_prime,I_lo,I_hi\n";
        for (int i = 0; i < pipe->orbit.p; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            os << pipe->orbit.p << ',' << fmt(map.r()) << ',' << fmt(pipe->orbit.multiplier)
               << ',' << pipe->captures.critical_index << ',' << i << ','
               << fmt(pipe->orbit.points[idx]) << ',' << fmt(pipe->orbit.saddles[idx]) << ','
               << fmt(pipe->orbit.companions[idx]) << ','
               << fmt(pipe->captures.intervals[idx].lo) << ','
               << fmt(pipe->captures.intervals[idx].hi) << '\n';
        }
        o.write(os.str());
    }
    return kExitOk;
}

int cmd_supercycle(const CommonOptions& o, int p, double r_lo, double r_hi) {
    const capmap::Family fam =
        o.family == "tent" ? capmap::Family::tent : capmap::Family::logistic;
    const double r = capmap::find_supercycle_parameter(fam, p, r_lo, r_hi);
    const capmap::MapFamily map =
        fam == capmap::Family::tent ? capmap::MapFamily::tent(r) : capmap::MapFamily::logistic(r);
    const double residual = map.iterate(map.critical(), p) - map.critical();
    if (o.format == "json") {
        nlohmann::json j;
        j["p"] = p;
        j["r"] = r;
        j["residual"] = residual;
        o.write(j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "p,r,residual\n" << p << ',' << fmt(r) << ',' << fmt(residual) << '\n';
        o.write(os.str());
    }
    return kExitOk;
}

int cmd_extrema(const CommonOptions& o, int q, const std::string& segments_out) {
    const capmap::MapFamily map = o.make_map();
    const capmap::ExtremaOptions opts{o.tol_root, 1e-9};
    const capmap::ExtremaTable table = capmap::build_extrema_table(map, q, opts);
    const capmap::SegmentModel model = capmap::build_segment_model(table, map);
    if (o.format == "json") {
        nlohmann::json j;
        j["q"] = q;
        nlohmann::json ext = nlohmann::json::array();
        for (const auto& e : table.entries())
            ext.push_back({{"x", e.x},
                           {"y", e.y},
                           {"kind", e.kind == capmap::ExtremumKind::maximum ? "max" : "min"},
                           {"depth", e.depth}});
        j["extrema"] = ext;
        nlohmann::json segs = nlohmann::json::array();
        for (const auto& s : model.segments)
            segs.push_back({{"x_lo", s.x_lo},
                            {"y_lo", s.y_lo},
                            {"x_hi", s.x_hi},
                            {"y_hi", s.y_hi},
                            {"slope", s.slope()},
                            {"intercept", s.intercept()}});
        j["segments"] = segs;
        o.write(j.dump(2) + "\n");
        return kExitOk;
    }
    std::ostringstream table_csv;
    capmap::write_extrema_csv(table_csv, table);
    o.write(table_csv.str());
    std::ostringstream segs_csv;
    capmap::write_segments_csv(segs_csv, model, map);
    if (!segments_out.empty()) {
        std::ofstream f(segments_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + segments_out);
        f << segs_csv.str();
    } else if (!o.out.empty()) {
        std::cout << segs_csv.str();
    }
    return kExitOk;
}

int cmd_capture(const CommonOptions& o, int q, int p_max) {
    const capmap::MapFamily map = o.make_map();
    const auto pipe = run_orbit_pipeline(map, p_max, o.tol_orbit);
    if (!pipe) {
        std::cerr << "no stable orbit of period <= " << p_max << " detected\n";
        return kExitNoAttractor;
    }
    const capmap::CaptureOptions opts{o.tol_root, 1e-8};
    const capmap::CaptureSet w = capmap::assemble_W_R(map, q, pipe->orbit, pipe->captures, opts);
    std::unique_ptr<capmap::CaptureSet> prev;
    if (q > 1)
        prev = std::make_unique<capmap::CaptureSet>(
            capmap::assemble_W_R(map, q - 1, pipe->orbit, pipe->captures, opts));
    if (o.format == "json") {
        o.write(capmap::capture_set_json(w, map.domain(), prev.get()) + "\n");
    } else {
        std::ostringstream os;
        capmap::write_capture_csv(os, w);
        o.write(os.str());
    }
    return kExitOk;
}

int cmd_prob(const CommonOptions& o, int q_lo, int q_hi, bool verify, std::int64_t n_samples,
             int p_max) {
    const capmap::MapFamily map = o.make_map();
    const auto pipe = run_orbit_pipeline(map, p_max, o.tol_orbit);
    if (!pipe) {
        std::cerr << "no stable orbit of period <= " << p_max << " detected\n";
        return kExitNoAttractor;
    }
    const capmap::CaptureOptions opts{o.tol_root, 1e-8};
    const double width = map.domain().length();

    bool verify_failed = false;
    std::ostringstream os;
    os << "q,P_q,P_exact_q,mc_estimate,mc_halfwidth\n";
    double prev_P = pipe->captures.measure / width; // P_0: the capture interval itself
    if (q_lo > 1) {
        const auto w0 = capmap::assemble_W_R(map, q_lo - 1, pipe->orbit, pipe->captures, opts);
        prev_P = w0.measure / width;
    }
    for (int q = q_lo; q <= q_hi; ++q) {
        const auto w = capmap::assemble_W_R(map, q, pipe->orbit, pipe->captures, opts);
        const double P = w.measure / width;
        double mc_est = std::numeric_limits<double>::quiet_NaN();
        double mc_half = std::numeric_limits<double>::quiet_NaN();
        if (verify) {
            capmap::McConfig cfg;
            cfg.n_samples = n_samples;
            cfg.rng_seed = o.seed;
            const auto mc = capmap::mc_capture_probability(map, q, pipe->captures, cfg);
            mc_est = mc.estimate;
            mc_half = mc.halfwidth;
            if (std::abs(P - mc.estimate) > mc.halfwidth) verify_failed = true;
        }
        os << q << ',' << fmt(P) << ',' << fmt(P - prev_P) << ',' << fmt(mc_est) << ','
           << fmt(mc_half) << '\n';
        prev_P = P;
    }
    o.write(os.str());
    return verify_failed ? kExitVerifyFail : kExitOk;
}

int cmd_verify(const CommonOptions& o, int q, std::int64_t n_samples, std::int64_t resolution,
               int p_max) {
    const capmap::MapFamily map = o.make_map();
    const auto pipe = run_orbit_pipeline(map, p_max, o.tol_orbit);
    if (!pipe) {
        std::cerr << "no stable orbit of period <= " << p_max << " detected\n";
        return kExitNoAttractor;
    }
    const capmap::CaptureOptions opts{o.tol_root, 1e-8};
    const auto w = capmap::assemble_W_R(map, q, pipe->orbit, pipe->captures, opts);

    capmap::McConfig cfg;
    cfg.n_samples = n_samples;
    cfg.rng_seed = o.seed;
    const auto mc = capmap::mc_capture_probability(map, q, pipe->captures, cfg);
    const auto grid = capmap::grid_capture_set(map, q, pipe->captures, resolution);
    const double symmdiff = capmap::symmetric_difference_measure(w.merged, grid);

    capmap::VerificationReport report;
    report.q = q;
    report.analytic_P = w.measure / map.domain().length();
    report.mc_estimate = mc.estimate;
    report.mc_halfwidth = mc.halfwidth;
    report.grid_symmdiff = symmdiff;
    const double grid_gate = 2.0 * map.domain().length() *
                                 static_cast<double>(w.merged.size()) /
                                 static_cast<double>(resolution) +
                             1e-6;
    report.pass =
        std::abs(report.analytic_P - mc.estimate) <= mc.halfwidth && symmdiff <= grid_gate;
    o.write(capmap::verification_report_json(report) + "\n");
    return report.pass ? kExitOk : kExitVerifyFail;
}

int cmd_bifurcation(const CommonOptions& o, double r_lo, double r_hi, int r_steps,
                    int burn_in, int n_record) {
    std::ostringstream os;
    os << "r,x\n";
    for (int k = 0; k < r_steps; ++k) {
        const double r =
            r_steps == 1 ? r_lo
                         : r_lo + (r_hi - r_lo) * static_cast<double>(k) / (r_steps - 1);
        const capmap::MapFamily map = o.family == "tent" ? capmap::MapFamily::tent(r)
                                                         : capmap::MapFamily::logistic(r);
        for (double x : capmap::attractor_samples(map, burn_in, n_record))
            os << fmt(r) << ',' << fmt(x) << '\n';
    }
    o.write(os.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"capture intervals and convergence probabilities for unimodal maps"};
    app.require_subcommand(1);

    CommonOptions common;
    int p = 3, p_max = 16, q = 6, q_max = -1;
    double r_lo = 0.0, r_hi = 4.0;
    int r_steps = 100, burn_in = 1000, n_record = 200;
    bool verify = false;
    std::int64_t n_samples = 1000000, resolution = 1000000;
    std::string segments_out;

    auto* orbit = app.add_subcommand("orbit", "stable orbit, saddles, companions, capture intervals");
    add_common(orbit, common);
    orbit->add_option("--p-max", p_max, "largest period to search for");

    auto* super = app.add_subcommand("supercycle", "solve f^p(C;r) = C for r");
    add_common(super, common);
    super->add_option("--p", p, "period of the supercycle")->required();
    super->add_option("--r-min", r_lo, "bracket lower end")->required();
    super->add_option("--r-max", r_hi, "bracket upper end")->required();

    auto* extrema = app.add_subcommand("extrema", "extrema table and segment model of f^q");
    add_common(extrema, common);
    extrema->add_option("--q", q, "iterate order")->required();
    extrema->add_option("--segments-out", segments_out, "segment CSV file (csv format)");

    auto* capture = app.add_subcommand("capture", "q-capture set W_R and its measure");
    add_common(capture, common);
    capture->add_option("--q", q, "iteration budget")->required();
    capture->add_option("--p-max", p_max, "largest period to search for");

    auto* prob = app.add_subcommand("prob", "capture probability table over a q range");
    add_common(prob, common);
    prob->add_option("--q", q, "first q of the range");
    prob->add_option("--q-max", q_max, "last q of the range");
    prob->add_flag("--verify", verify, "cross-check each row against Monte Carlo");
    prob->add_option("--samples", n_samples, "Monte Carlo sample count");
    prob->add_option("--p-max", p_max, "largest period to search for");

    auto* verify_cmd = app.add_subcommand("verify", "analytic vs Monte Carlo vs grid oracle");
    add_common(verify_cmd, common);
    verify_cmd->add_option("--q", q, "iteration budget")->required();
    verify_cmd->add_option("--samples", n_samples, "Monte Carlo sample count");
    verify_cmd->add_option("--resolution", resolution, "grid oracle resolution");
    verify_cmd->add_option("--p-max", p_max, "largest period to search for");

    auto* bif = app.add_subcommand("bifurcation", "attractor samples over an r range");
    add_common(bif, common);
    bif->add_option("--r-min", r_lo, "first parameter value")->required();
    bif->add_option("--r-max", r_hi, "last parameter value")->required();
    bif->add_option("--r-steps", r_steps, "number of parameter values");
    bif->add_option("--burn-in", burn_in, "iterations discarded before recording");
    bif->add_option("--record", n_record, "iterates recorded per parameter value");

    CLI11_PARSE(app, argc, argv);

    constexpr int kQLimit = 20; // extrema counts grow geometrically past this
    try {
        if (orbit->parsed()) return cmd_orbit(common, p_max);
        if (super->parsed()) return cmd_supercycle(common, p, r_lo, r_hi);
        if (extrema->parsed()) {
            if (q < 1 || q > kQLimit) throw std::invalid_argument("--q must be in [1,20]");
            return cmd_extrema(common, q, segments_out);
        }
        if (capture->parsed()) {
            if (q < 1 || q > kQLimit) throw std::invalid_argument("--q must be in [1,20]");
            return cmd_capture(common, q, p_max);
        }
        if (prob->parsed()) {
            if (q_max < 0) q_max = q;
            if (q < 1 || q_max > kQLimit || q > q_max)
                throw std::invalid_argument("--q/--q-max must satisfy 1 <= q <= q-max <= 20");
            return cmd_prob(common, q, q_max, verify, n_samples, p_max);
        }
        if (verify_cmd->parsed()) {
            if (q < 1 || q > kQLimit) throw std::invalid_argument("--q must be in [1,20]");
            return cmd_verify(common, q, n_samples, resolution, p_max);
        }
        if (bif->parsed()) return cmd_bifurcation(common, r_lo, r_hi, r_steps, burn_in, n_record);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const capmap::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
