#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

#include "capmap/errors.hpp"

namespace capmap {

// Bisection to machine width inside a sign-change bracket. fa is f(a);
// returns the endpoint with the smaller residual once the bracket collapses.
template <class F>
double bisect_root(F&& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0))
        throw bracket_error("bisect_root: no sign change in bracket");
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

// Newton iteration started at x0 and confined to the sign-change bracket
// [a,b]; any step that leaves the bracket or fails to shrink it falls back
// to bisection. Stops when |f| <= tol_residual or the bracket collapses.
template <class F, class DF>
double refine_root(F&& f, DF&& df, double a, double b, double fa, double fb,
                   double x0, double tol_residual, int max_iter = 100) {
    if ((fa < 0.0) == (fb < 0.0))
        throw bracket_error("refine_root: no sign change in bracket");
    if (x0 < a || x0 > b) x0 = 0.5 * (a + b);
    double x = x0;
    double fx = f(x);
    double best_x = x, best_f = std::abs(fx);
    for (int i = 0; i < max_iter; ++i) {
        if (std::abs(fx) <= tol_residual) return x;
        if (std::abs(fx) < best_f) {
            best_x = x;
            best_f = std::abs(fx);
        }
        // shrink the bracket around the root
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a <= 0.0 || a == 0.5 * (a + b) || b == 0.5 * (a + b))
            break;
        const double d = df(x);
        double next;
        if (d != 0.0 && std::isfinite(d)) {
            next = x - fx / d;
            if (!(next > a && next < b)) next = 0.5 * (a + b);
        } else {
            next = 0.5 * (a + b);
        }
        x = next;
        fx = f(x);
    }
    if (std::abs(fx) < best_f) {
        best_x = x;
        best_f = std::abs(fx);
    }
    return best_x;
}

// First sign change of g scanning outward from s in the given direction
// (+1/-1) with geometrically growing step; resolves roots at any distance
// scale >= h0. Probes are clipped at the domain edge; an |g| <= edge_tol
// value at the edge counts as a root there. Returns the refined root.
template <class G>
std::optional<double> scan_outward_root(G&& g, double s, int direction,
                                        double lo, double hi,
                                        double h0 = 1e-12,
                                        double growth = 1.25,
                                        double edge_tol = 1e-9) {
    const double dir = direction > 0 ? 1.0 : -1.0;
    double x_prev = s + dir * h0;
    if (x_prev < lo || x_prev > hi) return std::nullopt;
    double g_prev = g(x_prev);
    if (g_prev == 0.0) return x_prev;
    double h = h0 * growth;
    for (;;) {
        double x = s + dir * h;
        bool clipped = false;
        if (x < lo) {
            x = lo;
            clipped = true;
        } else if (x > hi) {
            x = hi;
            clipped = true;
        }
        const double gx = g(x);
        if (gx == 0.0) return x;
        if ((gx < 0.0) != (g_prev < 0.0)) {
            double a = x_prev, b = x, fa = g_prev, fb = gx;
            if (a > b) {
                std::swap(a, b);
                std::swap(fa, fb);
            }
            return bisect_root(g, a, b, fa, fb);
        }
        if (clipped) {
            if (std::abs(gx) <= edge_tol) return x;
            return std::nullopt;
        }
        x_prev = x;
        g_prev = gx;
        h *= growth;
    }
}

} // namespace capmap
