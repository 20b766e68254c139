#pragma once

#include <stdexcept>
#include <string>

namespace capmap {

// Base for all numerical failures raised by the library.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// A root bracket does not contain (exactly one) sign change.
struct bracket_error : numeric_error {
    explicit bracket_error(const std::string& what) : numeric_error(what) {}
};

// A parameter solve landed on an orbit whose minimal period divides the
// requested one.
struct wrong_period_error : numeric_error {
    explicit wrong_period_error(const std::string& what) : numeric_error(what) {}
};

// Two refined roots collided within tolerance. Signals a tangency, which
// occurs at bifurcation parameters where the genericity assumptions fail.
struct tangency_error : numeric_error {
    explicit tangency_error(const std::string& what) : numeric_error(what) {}
};

// The second derivative of f^q has no sign change inside a segment
// (typical for the boundary segments at a and b).
struct no_inflection_error : numeric_error {
    explicit no_inflection_error(const std::string& what) : numeric_error(what) {}
};

// Two capture intervals intersect; tol_orbit is too loose or a companion
// point was misidentified.
struct overlap_error : numeric_error {
    explicit overlap_error(const std::string& what) : numeric_error(what) {}
};

// Root polishing left the neighborhood of its seed.
struct polish_error : numeric_error {
    explicit polish_error(const std::string& what) : numeric_error(what) {}
};

} // namespace capmap
