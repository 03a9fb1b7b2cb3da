#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "detlab/error.hpp"
#include "detlab/linalg.hpp"
#include "detlab/matrix.hpp"
#include "detlab/tolerance.hpp"

namespace detlab {

/// Interpolation weight t ∈ [0, 1] of a matrix mean.
class mean_weight {
public:
    constexpr mean_weight() = default;
    explicit mean_weight(double t) : t_(t) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw domain_error("mean weight must lie in [0, 1], got " + std::to_string(t));
        }
    }
    [[nodiscard]] constexpr double value() const noexcept { return t_; }

private:
    double t_ = 0.5;
};

/// Condition numbers above this make a mean report an accuracy warning.
inline constexpr double mean_condition_limit = 1e12;

template <typename T>
struct mean_result {
    basic_matrix<T> value;
    double condition = 1.0;  ///< largest condition number among the operands that get inverted
    bool accuracy_warning = false;
};

namespace detail {

template <typename T>
double checked_condition(const basic_matrix<T>& m, const tolerance& tol) {
    return static_cast<double>(condition_number(m, tol));
}

} // namespace detail

/// Weighted geometric mean A♯ₜB = A^{1/2}(A^{-1/2}BA^{-1/2})ᵗA^{1/2}.
/// A must be positive definite, B positive semidefinite.
template <typename T>
mean_result<T> sharp(const basic_matrix<T>& a, const basic_matrix<T>& b, mean_weight t = mean_weight{0.5},
                     const tolerance& tol = {}) {
    if (a.size() != b.size()) throw dimension_error("sharp: operand dimensions differ");
    require_pd(a, tol, "sharp");
    require_psd(b, tol, "sharp");

    mean_result<T> out;
    out.condition = detail::checked_condition(a, tol);
    out.accuracy_warning = out.condition > mean_condition_limit;
    if (t.value() == 0.0) {
        out.value = a.symmetrized();
        return out;
    }
    const auto a_half = psd_power(a, 0.5, tol);
    const auto a_inv_half = psd_power(a, -0.5, tol);
    const auto inner = congruence(a_inv_half, b.symmetrized());
    out.value = congruence(a_half, psd_power(inner, t.value(), tol));
    return out;
}

/// A♮ₜB = A^{1/2}(B^{1/2}A^{-1}B^{1/2})ᵗA^{1/2}; both operands positive definite.
/// Not symmetric in (A, B).
template <typename T>
mean_result<T> natural(const basic_matrix<T>& a, const basic_matrix<T>& b, mean_weight t = mean_weight{0.5},
                       const tolerance& tol = {}) {
    if (a.size() != b.size()) throw dimension_error("natural: operand dimensions differ");
    require_pd(a, tol, "natural");
    require_pd(b, tol, "natural");

    mean_result<T> out;
    out.condition = std::max(detail::checked_condition(a, tol), detail::checked_condition(b, tol));
    out.accuracy_warning = out.condition > mean_condition_limit;
    if (t.value() == 0.0) {
        out.value = a.symmetrized();
        return out;
    }
    const auto b_half = psd_power(b, 0.5, tol);
    const auto inner = congruence(b_half, psd_power(a, -1.0, tol));
    out.value = congruence(psd_power(a, 0.5, tol), psd_power(inner, t.value(), tol));
    return out;
}

} // namespace detlab
