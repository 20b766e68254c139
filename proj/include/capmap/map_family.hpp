#pragma once

#include <string>
#include <vector>

#include "capmap/intervals.hpp"

namespace capmap {

enum class Family { logistic, tent, custom };

const char* family_name(Family f);

// A one-parameter unimodal map f : [a,b] -> [a,b] with a single interior
// maximum at the critical point C. Logistic and tent are built in; custom
// maps are polynomials given by their coefficient list (ascending powers)
// with a declared critical point.
//
// Construction verifies, on a dense grid, that f maps the domain into
// itself, that f is increasing left of C and decreasing right of C, and
// (for smooth families) that the Schwarzian derivative is negative away
// from C. Instances are immutable and every operation is pure, so they are
// safe to share across threads.
class MapFamily {
public:
    static MapFamily logistic(double r);
    static MapFamily tent(double r);
    static MapFamily custom(std::vector<double> coeffs, double critical, Interval domain);

    Family family() const { return family_; }
    double r() const { return r_; }
    Interval domain() const { return domain_; }
    double critical() const { return critical_; }
    double scale() const { return domain_.length(); }
    // tent has a kink at C; everything else here is C^infinity
    bool smooth() const { return family_ != Family::tent; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    double eval(double x) const;              // throws std::domain_error outside [a,b]
    double derivative(double x) const;        // throws std::domain_error at the tent kink
    double second_derivative(double x) const;
    double third_derivative(double x) const;
    // f'''/f' - (3/2)(f''/f')^2; throws std::domain_error where f' = 0
    double schwarzian(double x) const;

    // q-fold composition; q = 0 is the identity. Intermediate values are
    // clamped to the domain to absorb rounding at the edges.
    double iterate(double x, int q) const;
    // d/dx f^q by the chain rule over the orbit of x
    double iterate_derivative(double x, int q) const;
    // value, first and second derivative of f^q accumulated in one pass
    void iterate_jet2(double x, int q, double& value, double& d1, double& d2) const;

    // map specification file, e.g. {"family":"logistic","r":3.2,"domain":[0,1]}
    static MapFamily from_json_text(const std::string& text);
    static MapFamily from_json_file(const std::string& path);
    std::string to_json_text() const;

private:
    MapFamily(Family family, double r, Interval domain, double critical,
              std::vector<double> coeffs);
    void validate_on_grid(int n_grid) const;
    double eval_unchecked(double x) const;

    Family family_;
    double r_;
    Interval domain_;
    double critical_;
    std::vector<double> coeffs_; // custom family only, ascending powers
};

// Names the composition f^q as an object; evaluating it is exactly
// map.iterate(x, q).
struct IterateHandle {
    const MapFamily& map;
    int q;
    double operator()(double x) const { return map.iterate(x, q); }
};

} // namespace capmap
