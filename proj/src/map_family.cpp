#include "capmap/map_family.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace capmap {

const char* family_name(Family f) {
    switch (f) {
        case Family::logistic: return "logistic";
        case Family::tent: return "tent";
        case Family::custom: return "custom";
    }
    return "?";
}

MapFamily::MapFamily(Family family, double r, Interval domain, double critical,
                     std::vector<double> coeffs)
    : family_(family), r_(r), domain_(domain), critical_(critical),
      coeffs_(std::move(coeffs)) {
    if (!(domain_.lo < critical_ && critical_ < domain_.hi))
        throw std::invalid_argument("MapFamily: critical point must be interior to the domain");
    validate_on_grid(10000);
}

MapFamily MapFamily::logistic(double r) {
    if (!(r > 0.0 && r <= 4.0))
        throw std::invalid_argument("logistic: need 0 < r <= 4");
    return MapFamily(Family::logistic, r, Interval{0.0, 1.0}, 0.5, {});
}

MapFamily MapFamily::tent(double r) {
    if (!(r > 0.0 && r <= 2.0))
        throw std::invalid_argument("tent: need 0 < r <= 2");
    return MapFamily(Family::tent, r, Interval{0.0, 1.0}, 0.5, {});
}

MapFamily MapFamily::custom(std::vector<double> coeffs, double critical, Interval domain) {
    if (coeffs.empty())
        throw std::invalid_argument("custom: empty coefficient list");
    return MapFamily(Family::custom, 0.0, domain, critical, std::move(coeffs));
}

namespace {

double poly_eval(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

// k-th formal derivative evaluated at x
double poly_derivative(const std::vector<double>& c, double x, int order) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        if (static_cast<int>(k) < order) break;
        double fac = 1.0;
        for (int j = 0; j < order; ++j) fac *= static_cast<double>(k - j);
        v = v * x + fac * c[k];
    }
    return v;
}

} // namespace

double MapFamily::eval_unchecked(double x) const {
    switch (family_) {
        case Family::logistic: return r_ * x * (1.0 - x);
        case Family::tent: return x <= critical_ ? r_ * x : r_ * (1.0 - x);
        case Family::custom: return poly_eval(coeffs_, x);
    }
    return 0.0;
}

double MapFamily::eval(double x) const {
    if (!domain_.contains(x)) {
        std::ostringstream os;
        os << "eval: x = " << x << " outside [" << domain_.lo << ", " << domain_.hi << "]";
        throw std::domain_error(os.str());
    }
    return eval_unchecked(x);
}

double MapFamily::derivative(double x) const {
    if (!domain_.contains(x)) throw std::domain_error("derivative: x outside domain");
    switch (family_) {
        case Family::logistic:
            return r_ * (1.0 - 2.0 * x);
        case Family::tent:
            if (x == critical_)
                throw std::domain_error("derivative: tent map is not differentiable at C");
            return x < critical_ ? r_ : -r_;
        case Family::custom:
            return poly_derivative(coeffs_, x, 1);
    }
    return 0.0;
}

double MapFamily::second_derivative(double x) const {
    if (!domain_.contains(x)) throw std::domain_error("second_derivative: x outside domain");
    switch (family_) {
        case Family::logistic: return -2.0 * r_;
        case Family::tent:
            if (x == critical_)
                throw std::domain_error("second_derivative: tent map kink");
            return 0.0;
        case Family::custom: return poly_derivative(coeffs_, x, 2);
    }
    return 0.0;
}

double MapFamily::third_derivative(double x) const {
    if (!domain_.contains(x)) throw std::domain_error("third_derivative: x outside domain");
    switch (family_) {
        case Family::logistic: return 0.0;
        case Family::tent:
            if (x == critical_)
                throw std::domain_error("third_derivative: tent map kink");
            return 0.0;
        case Family::custom: return poly_derivative(coeffs_, x, 3);
    }
    return 0.0;
}

double MapFamily::schwarzian(double x) const {
    const double d1 = derivative(x);
    if (std::abs(d1) < 1e-300)
        throw std::domain_error("schwarzian: f' vanishes");
    const double d2 = second_derivative(x);
    const double d3 = third_derivative(x);
    const double ratio = d2 / d1;
    return d3 / d1 - 1.5 * ratio * ratio;
}

double MapFamily::iterate(double x, int q) const {
    if (!domain_.contains(x)) throw std::domain_error("iterate: x outside domain");
    if (q < 0) throw std::invalid_argument("iterate: q must be >= 0");
    double v = x;
    for (int k = 0; k < q; ++k) {
        v = eval_unchecked(v);
        // absorb rounding at the edges
        v = std::min(std::max(v, domain_.lo), domain_.hi);
    }
    return v;
}

double MapFamily::iterate_derivative(double x, int q) const {
    if (!domain_.contains(x)) throw std::domain_error("iterate_derivative: x outside domain");
    double v = x;
    double d = 1.0;
    for (int k = 0; k < q; ++k) {
        d *= derivative(v);
        v = std::min(std::max(eval_unchecked(v), domain_.lo), domain_.hi);
    }
    return d;
}

void MapFamily::iterate_jet2(double x, int q, double& value, double& d1, double& d2) const {
    if (!domain_.contains(x)) throw std::domain_error("iterate_jet2: x outside domain");
    double v = x, g1 = 1.0, g2 = 0.0;
    for (int k = 0; k < q; ++k) {
        const double fp = derivative(v);
        const double fpp = second_derivative(v);
        g2 = fpp * g1 * g1 + fp * g2;
        g1 = fp * g1;
        v = std::min(std::max(eval_unchecked(v), domain_.lo), domain_.hi);
    }
    value = v;
    d1 = g1;
    d2 = g2;
}

void MapFamily::validate_on_grid(int n_grid) const {
    const double a = domain_.lo, b = domain_.hi;
    const double tol = 1e-9 * scale();
    double prev = eval_unchecked(a);
    if (prev < a - tol || prev > b + tol)
        throw std::invalid_argument("MapFamily: f(a) escapes the domain");
    for (int k = 1; k <= n_grid; ++k) {
        const double x = a + (b - a) * static_cast<double>(k) / n_grid;
        const double y = eval_unchecked(x);
        if (y < a - tol || y > b + tol)
            throw std::invalid_argument("MapFamily: f escapes the domain");
        const double xm = a + (b - a) * static_cast<double>(k - 1) / n_grid;
        if (x <= critical_ && y < prev - tol)
            throw std::invalid_argument("MapFamily: f is not increasing left of C");
        if (xm >= critical_ && y > prev + tol)
            throw std::invalid_argument("MapFamily: f is not decreasing right of C");
        prev = y;
    }
    if (smooth()) {
        for (int k = 1; k < n_grid; ++k) {
            const double x = a + (b - a) * static_cast<double>(k) / n_grid;
            if (std::abs(x - critical_) < 1e-3 * scale()) continue;
            if (std::abs(derivative(x)) < 1e-6) continue;
            if (schwarzian(x) >= 0.0)
                throw std::invalid_argument("MapFamily: Schwarzian derivative is not negative");
        }
    }
}

MapFamily MapFamily::from_json_text(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "logistic" || fam == "tent") {
        const double r = j.at("r").get<double>();
        if (j.contains("domain")) {
            const auto d = j.at("domain");
            if (d.at(0).get<double>() != 0.0 || d.at(1).get<double>() != 1.0)
                throw std::invalid_argument("map spec: built-in families use domain [0,1]");
        }
        return fam == "logistic" ? logistic(r) : tent(r);
    }
    if (fam == "custom") {
        const auto d = j.at("domain");
        return custom(j.at("coeffs").get<std::vector<double>>(),
                      j.at("critical").get<double>(),
                      Interval{d.at(0).get<double>(), d.at(1).get<double>()});
    }
    throw std::invalid_argument("map spec: unknown family '" + fam + "'");
}

MapFamily MapFamily::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string MapFamily::to_json_text() const {
    nlohmann::json j;
    j["family"] = family_name(family_);
    j["domain"] = {domain_.lo, domain_.hi};
    if (family_ == Family::custom) {
        j["coeffs"] = coeffs_;
        j["critical"] = critical_;
    } else {
        j["r"] = r_;
    }
    return j.dump();
}

} // namespace capmap
