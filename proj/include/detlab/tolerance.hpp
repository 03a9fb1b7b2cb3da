#pragma once

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>

#include "detlab/error.hpp"

namespace detlab {

/// Relative tolerance plus an absolute floor. Both are non-negative.
struct tolerance {
    double rel = 1e-9;
    double abs = 1e-12;

    constexpr tolerance() = default;
    constexpr tolerance(double rel_, double abs_) : rel(rel_), abs(abs_) {}

    /// Threshold for a quantity whose natural magnitude is `scale`.
    [[nodiscard]] constexpr double at_scale(double scale) const noexcept {
        const double s = scale < 1.0 ? 1.0 : scale;
        return rel * s + abs;
    }

    friend constexpr bool operator==(const tolerance&, const tolerance&) = default;
};

inline void validate(const tolerance& tol) {
    if (!(tol.rel >= 0.0) || !(tol.abs >= 0.0)) {
        throw domain_error("tolerance components must be non-negative");
    }
}

/// Parses "rel" or "rel,abs".
inline tolerance parse_tolerance(const std::string& text) {
    tolerance tol;
    std::istringstream in(text);
    char comma = 0;
    if (!(in >> tol.rel)) {
        throw parse_error("tolerance: expected a number, got '" + text + "'");
    }
    if (in >> comma) {
        if (comma != ',' || !(in >> tol.abs)) {
            throw parse_error("tolerance: expected 'rel' or 'rel,abs', got '" + text + "'");
        }
    }
    validate(tol);
    return tol;
}

/// Default tolerance, overridable through the DETLAB_TOL environment variable.
inline tolerance default_tolerance() {
    if (const char* env = std::getenv("DETLAB_TOL"); env != nullptr && *env != '\0') {
        return parse_tolerance(env);
    }
    return {};
}

} // namespace detlab
