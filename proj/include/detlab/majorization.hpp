#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "detlab/error.hpp"
#include "detlab/linalg.hpp"
#include "detlab/matrix.hpp"
#include "detlab/tolerance.hpp"

namespace detlab {

/// Real vector kept in non-increasing order (x↓).
template <typename T>
class basic_eigenvalue_vector {
public:
    basic_eigenvalue_vector() = default;

    explicit basic_eigenvalue_vector(std::vector<T> values) : values_(std::move(values)) {
        for (const T& v : values_) {
            if (!std::isfinite(static_cast<double>(v))) throw domain_error("eigenvalue vector entry is not finite");
        }
        std::sort(values_.begin(), values_.end(), std::greater<>());
    }

    basic_eigenvalue_vector(std::initializer_list<T> values)
        : basic_eigenvalue_vector(std::vector<T>(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<T>& values() const noexcept { return values_; }
    T operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] T sum() const noexcept {
        T s{0};
        for (const T& v : values_) s += v;
        return s;
    }

    [[nodiscard]] std::vector<double> to_double() const {
        return {values_.begin(), values_.end()};
    }

private:
    std::vector<T> values_;
};

using eigenvalue_vector = basic_eigenvalue_vector<double>;

/// Outcome of one majorization test.
///
/// `slack` is min over k of (partial_x(k) − partial_y(k)), in log units for
/// the multiplicative variants; `worst_k` is the 1-based k attaining it.
struct majorization_verdict {
    bool holds = false;
    std::size_t worst_k = 0;
    double slack = 0.0;
    double equality_defect = 0.0;  ///< |total_x − total_y|
    double threshold = 0.0;        ///< tolerance the slack was compared against
};

namespace detail {

template <typename T>
void require_same_length(const basic_eigenvalue_vector<T>& x, const basic_eigenvalue_vector<T>& y) {
    if (x.size() != y.size() || x.size() == 0) {
        throw dimension_error("majorization: vectors must be non-empty and of equal length (" +
                              std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    }
}

// Partial-sum comparison shared by every variant. `diff` maps partial sums to
// the signed difference so that the log variants can encode −∞.
template <typename T, typename Diff>
majorization_verdict scan_partial_sums(const std::vector<T>& px, const std::vector<T>& py, Diff diff) {
    majorization_verdict v;
    v.slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < px.size(); ++k) {
        const double d = diff(px[k], py[k]);
        if (d < v.slack) {
            v.slack = d;
            v.worst_k = k + 1;
        }
    }
    const double total = diff(px.back(), py.back());
    v.equality_defect = abs(total);
    return v;
}

template <typename T>
majorization_verdict additive(const basic_eigenvalue_vector<T>& x, const basic_eigenvalue_vector<T>& y,
                              const tolerance& tol) {
    require_same_length(x, y);
    std::vector<T> px(x.size()), py(y.size());
    T sx{0}, sy{0}, mag{1};
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        px[k] = sx;
        py[k] = sy;
        mag += abs(x[k]) + abs(y[k]);
    }
    auto v = scan_partial_sums(px, py, [](T a, T b) { return static_cast<double>(a - b); });
    v.threshold = std::max(tol.abs, tol.rel * static_cast<double>(mag));
    v.holds = v.slack >= -v.threshold;
    return v;
}

template <typename T>
T log_or_minus_inf(T v, T floor) {
    return v <= floor ? -std::numeric_limits<T>::infinity() : log(v);
}

template <typename T>
majorization_verdict multiplicative(const basic_eigenvalue_vector<T>& x, const basic_eigenvalue_vector<T>& y,
                                    const tolerance& tol) {
    require_same_length(x, y);
    // Entries at or below the floor count as exact zeros (log 0 = −∞).
    const T top = std::max(x[0], y[0]);
    const T floor = static_cast<T>(tol.abs) * top;
    if (x[x.size() - 1] < -floor || y[y.size() - 1] < -floor) {
        throw domain_error("log-majorization: entries must be non-negative");
    }
    std::vector<T> px(x.size()), py(y.size());
    T sx{0}, sy{0};
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += log_or_minus_inf(x[k], floor);
        sy += log_or_minus_inf(y[k], floor);
        px[k] = sx;
        py[k] = sy;
    }
    auto v = scan_partial_sums(px, py, [](T a, T b) -> double {
        const bool a_zero = std::isinf(static_cast<double>(a));
        const bool b_zero = std::isinf(static_cast<double>(b));
        if (a_zero && b_zero) return 0.0;
        if (a_zero) return -std::numeric_limits<double>::infinity();
        if (b_zero) return std::numeric_limits<double>::infinity();
        return static_cast<double>(a - b);
    });
    // Relative tolerance per factor, summed over the longest product.
    v.threshold = tol.rel * static_cast<double>(x.size()) + tol.abs;
    v.holds = v.slack >= -v.threshold;
    return v;
}

} // namespace detail

/// x ≻_w y: every partial sum of x↓ dominates that of y↓.
template <typename T>
majorization_verdict weak_majorizes(const basic_eigenvalue_vector<T>& x, const basic_eigenvalue_vector<T>& y,
                                    const tolerance& tol = {}) {
    return detail::additive(x, y, tol);
}

/// x ≻ y: weak majorization with equal totals.
template <typename T>
majorization_verdict majorizes(const basic_eigenvalue_vector<T>& x, const basic_eigenvalue_vector<T>& y,
                               const tolerance& tol = {}) {
    auto v = detail::additive(x, y, tol);
    v.holds = v.holds && v.equality_defect <= v.threshold;
    return v;
}

/// x ≻_{w log} y on non-negative vectors, evaluated with logarithms.
template <typename T>
majorization_verdict weak_log_majorizes(const basic_eigenvalue_vector<T>& x, const basic_eigenvalue_vector<T>& y,
                                        const tolerance& tol = {}) {
    return detail::multiplicative(x, y, tol);
}

/// x ≻_log y: weak log-majorization with equal total products.
///
/// Zero entries follow log 0 = −∞: if exactly one side has a zero total
/// product the equality defect is infinite and the relation fails; two zero
/// totals count as equal.
template <typename T>
majorization_verdict log_majorizes(const basic_eigenvalue_vector<T>& x, const basic_eigenvalue_vector<T>& y,
                                   const tolerance& tol = {}) {
    auto v = detail::multiplicative(x, y, tol);
    v.holds = v.holds && v.equality_defect <= v.threshold;
    return v;
}

/// Spectrum of XY for PSD X, Y, read off the similar symmetric matrix
/// X^{1/2}·Y·X^{1/2}. Rounding-level negatives are reported as 0.
template <typename T>
basic_eigenvalue_vector<T> spectrum_of_product(const basic_matrix<T>& x, const basic_matrix<T>& y,
                                               const tolerance& tol = {}) {
    if (x.size() != y.size()) throw dimension_error("spectrum_of_product: operand dimensions differ");
    require_psd(x, tol, "spectrum_of_product");
    require_psd(y, tol, "spectrum_of_product");
    auto ev = sym_eigenvalues(congruence(psd_power(x, 0.5, tol), y.symmetrized()), tol);
    for (T& v : ev) v = std::max(v, T{0});
    return basic_eigenvalue_vector<T>(std::move(ev));
}

/// Eigenvalues of a symmetric matrix as a descending vector.
template <typename T>
basic_eigenvalue_vector<T> spectrum(const basic_matrix<T>& m, const tolerance& tol = {}) {
    return basic_eigenvalue_vector<T>(sym_eigenvalues(m, tol));
}

} // namespace detlab
