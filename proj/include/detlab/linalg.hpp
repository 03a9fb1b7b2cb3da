#pragma once

#include <algorithm>
#include <functional>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "detlab/error.hpp"
#include "detlab/matrix.hpp"
#include "detlab/tolerance.hpp"

namespace detlab {

/// Eigenvalues in non-increasing order together with the orthogonal matrix
/// whose columns are the matching eigenvectors, so that M = Q·diag(λ)·Qᵀ.
template <typename T>
struct spectral_decomposition {
    std::vector<T> eigenvalues;
    basic_matrix<T> basis;

    [[nodiscard]] basic_matrix<T> reconstruct() const {
        return apply([](T v) { return v; });
    }

    /// Q·diag(f(λ))·Qᵀ, symmetrized.
    template <typename F>
    [[nodiscard]] basic_matrix<T> apply(F&& f) const {
        const std::size_t n = eigenvalues.size();
        basic_matrix<T> out(n);
        std::vector<T> fv(n);
        for (std::size_t k = 0; k < n; ++k) fv[k] = f(eigenvalues[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                T s{0};
                for (std::size_t k = 0; k < n; ++k) s += basis(i, k) * fv[k] * basis(j, k);
                out(i, j) = s;
                out(j, i) = s;
            }
        return out;
    }
};

namespace detail {

template <typename T>
void jacobi_rotate(basic_matrix<T>& a, basic_matrix<T>& v, std::size_t p, std::size_t q) {
    const std::size_t n = a.size();
    const T apq = a(p, q);
    const T theta = (a(q, q) - a(p, p)) / (T{2} * apq);
    const T t = (theta >= T{0} ? T{1} : T{-1}) / (abs(theta) + sqrt(theta * theta + T{1}));
    const T c = T{1} / sqrt(t * t + T{1});
    const T s = t * c;
    for (std::size_t k = 0; k < n; ++k) {
        const T akp = a(k, p);
        const T akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const T apk = a(p, k);
        const T aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    a(p, q) = T{0};
    a(q, p) = T{0};
    for (std::size_t k = 0; k < n; ++k) {
        const T vkp = v(k, p);
        const T vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

inline void require_square_nonempty(std::size_t n, const char* what) {
    if (n == 0) throw dimension_error(std::string(what) + ": matrix must have n >= 1");
}

} // namespace detail

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized first; a symmetry defect larger than
/// tol.rel·‖M‖_F is rejected with domain_error.
template <typename T>
spectral_decomposition<T> sym_eigen(const basic_matrix<T>& m, const tolerance& tol = {}) {
    const std::size_t n = m.size();
    detail::require_square_nonempty(n, "sym_eigen");
    const T fro = m.frobenius_norm();
    if (symmetry_defect(m) > static_cast<T>(tol.rel) * fro) {
        throw domain_error("sym_eigen: input is not symmetric (defect " +
                           std::to_string(static_cast<double>(symmetry_defect(m))) + ")");
    }

    basic_matrix<T> a = m.symmetrized();
    basic_matrix<T> v = basic_matrix<T>::identity(n);
    constexpr int max_sweeps = 100;
    const T tiny = std::numeric_limits<T>::min();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        T off{0};
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += abs(a(p, q));
        if (off <= tiny) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const T apq = abs(a(p, q));
                if (apq <= tiny) continue;
                // Once the diagonal swallows the off-diagonal entry, drop it.
                const T g = T{100} * apq;
                if (sweep > 3 && abs(a(p, p)) + g == abs(a(p, p)) &&
                    abs(a(q, q)) + g == abs(a(q, q))) {
                    a(p, q) = T{0};
                    a(q, p) = T{0};
                    continue;
                }
                detail::jacobi_rotate(a, v, p, q);
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    spectral_decomposition<T> out{std::vector<T>(n), basic_matrix<T>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.basis(i, k) = v(i, order[k]);
    }
    return out;
}

template <typename T>
std::vector<T> sym_eigenvalues(const basic_matrix<T>& m, const tolerance& tol = {}) {
    return sym_eigen(m, tol).eigenvalues;
}

/// Clamp band for rounding-level eigenvalues: values in [−threshold, 0) are
/// taken to be 0, and a matrix whose smallest eigenvalue does not exceed the
/// threshold counts as singular. Relative to the largest magnitude so that
/// M ↦ cM commutes with every spectral function.
template <typename T>
T zero_threshold(const std::vector<T>& eigenvalues, const tolerance& tol) {
    const T top = eigenvalues.empty() ? T{0} : std::max(abs(eigenvalues.front()), abs(eigenvalues.back()));
    return static_cast<T>(tol.abs) * top;
}

/// Q·diag(λᵢᵖ)·Qᵀ for symmetric positive semidefinite M.
///
/// Negative eigenvalues inside the clamp band become 0; positive ones are
/// used as they are, however small. For p = 0 the result is the orthogonal
/// projector onto the eigenvectors above the threshold, which is I for
/// positive definite M.
template <typename T>
basic_matrix<T> psd_power(const basic_matrix<T>& m, double p, const tolerance& tol = {}) {
    if (!std::isfinite(p)) throw domain_error("psd_power: exponent must be finite");
    const auto d = sym_eigen(m, tol);
    const T thr = zero_threshold(d.eigenvalues, tol);
    if (d.eigenvalues.back() < -thr) {
        throw not_psd_error("psd_power: eigenvalue " +
                            std::to_string(static_cast<double>(d.eigenvalues.back())) +
                            " is below the clamp threshold");
    }
    if (p < 0.0 && d.eigenvalues.back() <= thr) {
        throw singularity_error("psd_power: negative exponent of a singular matrix");
    }
    if (p == 1.0) return m.symmetrized();
    const T pt = static_cast<T>(p);
    return d.apply([&](T lambda) -> T {
        if (p == 0.0) return lambda > thr ? T{1} : T{0};
        if (lambda <= T{0}) return T{0};
        return pow(lambda, pt);
    });
}

/// XᵀX with exact symmetry.
template <typename T>
basic_matrix<T> gram(const basic_matrix<T>& x) {
    return (x.transpose() * x).symmetrized();
}

/// Right singular vectors and singular values of X (non-increasing): the
/// columns vᵢ of `basis` satisfy |X| = Σᵢ σᵢ·vᵢvᵢᵀ, so the decomposition is
/// also the spectral decomposition of |X|.
///
/// One-sided (Hestenes) Jacobi on the columns of X. Unlike an eigensolver on
/// XᵀX it does not square the data, so singular values are accurate to about
/// u·‖X‖ rather than √u·‖X‖.
template <typename T>
spectral_decomposition<T> svd_right(const basic_matrix<T>& x) {
    const std::size_t n = x.size();
    detail::require_square_nonempty(n, "svd_right");
    basic_matrix<T> u = x;
    basic_matrix<T> v = basic_matrix<T>::identity(n);
    const T eps = std::numeric_limits<T>::epsilon();
    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                T alpha{0}, beta{0}, gamma{0};
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == T{0} || abs(gamma) <= eps * sqrt(alpha * beta)) continue;
                rotated = true;
                const T zeta = (beta - alpha) / (T{2} * gamma);
                const T t = (zeta >= T{0} ? T{1} : T{-1}) / (abs(zeta) + sqrt(T{1} + zeta * zeta));
                const T c = T{1} / sqrt(T{1} + t * t);
                const T s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const T up = u(i, p);
                    const T uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                    const T vp = v(i, p);
                    const T vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        if (!rotated) break;
    }
    std::vector<T> sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        T s{0};
        for (std::size_t i = 0; i < n; ++i) s += u(i, j) * u(i, j);
        sv[j] = sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return sv[i] > sv[j]; });
    spectral_decomposition<T> out{std::vector<T>(n), basic_matrix<T>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = sv[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.basis(i, k) = v(i, order[k]);
    }
    return out;
}

/// Singular values of X, non-increasing.
template <typename T>
std::vector<T> singular_values(const basic_matrix<T>& x) {
    return svd_right(x).eigenvalues;
}

/// |X|ᵖ = (XᵀX)^{p/2} for p ≥ 0; p = 1 gives the absolute value |X|.
///
/// Assembled as V·diag(σᵢᵖ)·Vᵀ from the singular value decomposition, which
/// is exactly symmetric and keeps the small singular values that forming
/// XᵀX would bury under rounding noise. For p = 0 the result is the
/// projector onto the right singular vectors with σᵢ above the threshold.
template <typename T>
basic_matrix<T> abs_power(const basic_matrix<T>& x, double p, const tolerance& tol = {}) {
    detail::require_square_nonempty(x.size(), "abs_value");
    if (!std::isfinite(p) || p < 0.0) throw domain_error("abs_power: exponent must be finite and >= 0");
    const auto d = svd_right(x);
    const T thr = zero_threshold(d.eigenvalues, tol);
    const T pt = static_cast<T>(p);
    return d.apply([&](T sigma) -> T {
        if (p == 0.0) return sigma > thr ? T{1} : T{0};
        if (sigma == T{0}) return T{0};
        return pow(sigma, pt);
    });
}

/// |X| = (XᵀX)^{1/2}; its eigenvalues are the singular values of X.
template <typename T>
basic_matrix<T> abs_value(const basic_matrix<T>& x, const tolerance& tol = {}) {
    return abs_power(x, 1.0, tol);
}

/// Orthogonal factor U of the polar decomposition X = U|X|, as W·Vᵀ with
/// X = WΣVᵀ.
///
/// The left singular vectors come from the columns of X·V, orthonormalized
/// in order of decreasing σ (Gram–Schmidt, applied twice). Forming X·|X|⁻¹
/// directly loses orthogonality in proportion to κ(X); this way the columns
/// belonging to small σ are fixed by orthogonality to the well-determined
/// ones, and UᵀU = I holds to working precision.
template <typename T>
basic_matrix<T> polar_unitary(const basic_matrix<T>& x, const tolerance& tol = {}) {
    const std::size_t n = x.size();
    detail::require_square_nonempty(n, "polar_unitary");
    const auto d = svd_right(x);
    const T smax = d.eigenvalues.front();
    const T smin = d.eigenvalues.back();
    if (!(smin > static_cast<T>(tol.abs) * smax)) {
        throw singularity_error("polar_unitary: smallest singular value " +
                                std::to_string(static_cast<double>(smin)) +
                                " is too small; regularize the operands first");
    }
    basic_matrix<T> w = x * d.basis;
    for (std::size_t k = 0; k < n; ++k) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < k; ++j) {
                T dot{0};
                for (std::size_t i = 0; i < n; ++i) dot += w(i, j) * w(i, k);
                for (std::size_t i = 0; i < n; ++i) w(i, k) -= dot * w(i, j);
            }
        }
        T norm{0};
        for (std::size_t i = 0; i < n; ++i) norm += w(i, k) * w(i, k);
        norm = sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) w(i, k) /= norm;
    }
    return w * d.basis.transpose();
}

/// Determinant through LU factorization with partial pivoting.
template <typename T>
T det_general(const basic_matrix<T>& m) {
    const std::size_t n = m.size();
    detail::require_square_nonempty(n, "det_general");
    basic_matrix<T> lu = m;
    T det{1};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(lu(r, col)) > abs(lu(piv, col))) piv = r;
        if (lu(piv, col) == T{0}) return T{0};
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(piv, j), lu(col, j));
            det = -det;
        }
        const T pivot = lu(col, col);
        det *= pivot;
        for (std::size_t r = col + 1; r < n; ++r) {
            const T f = lu(r, col) / pivot;
            if (f == T{0}) continue;
            for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
        }
    }
    return det;
}

/// Largest singular value.
template <typename T>
T spectral_norm(const basic_matrix<T>& m) {
    detail::require_square_nonempty(m.size(), "spectral_norm");
    tolerance loose{1.0, 0.0};
    return sqrt(std::max(sym_eigen(gram(m), loose).eigenvalues.front(), T{0}));
}

/// A + eps·‖A‖·I, or eps·I when A = 0.
template <typename T>
basic_matrix<T> regularize(const basic_matrix<T>& a, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw domain_error("regularize: eps must be positive");
    }
    detail::require_square_nonempty(a.size(), "regularize");
    const T norm = spectral_norm(a);
    const T shift = norm == T{0} ? static_cast<T>(eps) : static_cast<T>(eps) * norm;
    basic_matrix<T> out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out(i, i) += shift;
    return out;
}

template <typename T>
bool is_psd(const basic_matrix<T>& m, const tolerance& tol = {}) {
    if (m.size() == 0 || !m.all_finite()) return false;
    if (symmetry_defect(m) > static_cast<T>(tol.rel) * m.frobenius_norm() + static_cast<T>(tol.abs)) {
        return false;
    }
    const auto ev = sym_eigenvalues(m.symmetrized(), tol);
    return ev.back() >= -static_cast<T>(tol.rel) * (T{1} + std::max(ev.front(), T{0}));
}

/// λ₁/λₙ of a symmetric matrix; infinity when λₙ ≤ 0.
template <typename T>
T condition_number(const basic_matrix<T>& m, const tolerance& tol = {}) {
    const auto ev = sym_eigenvalues(m, tol);
    if (ev.back() <= T{0}) return std::numeric_limits<T>::infinity();
    return ev.front() / ev.back();
}

/// Throws not_psd_error unless M is symmetric positive definite.
template <typename T>
void require_pd(const basic_matrix<T>& m, const tolerance& tol, const char* who) {
    const auto ev = sym_eigenvalues(m, tol);
    if (!(ev.back() > zero_threshold(ev, tol))) {
        throw not_psd_error(std::string(who) + ": operand is not positive definite (lambda_min = " +
                            std::to_string(static_cast<double>(ev.back())) + ")");
    }
}

template <typename T>
void require_psd(const basic_matrix<T>& m, const tolerance& tol, const char* who) {
    if (!is_psd(m, tol)) {
        throw not_psd_error(std::string(who) + ": operand is not positive semidefinite");
    }
}

} // namespace detlab
