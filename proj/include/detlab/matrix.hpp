#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "detlab/error.hpp"
#include "detlab/scalar.hpp"

namespace detlab {

/// Dense real square matrix stored row-major.
///
/// Every operation that combines two matrices checks the dimensions and
/// throws dimension_error on mismatch. Entries are required to be finite
/// when a matrix is constructed from external data (see `checked`).
template <typename T>
class basic_matrix {
public:
    using value_type = T;

    basic_matrix() = default;

    explicit basic_matrix(std::size_t n, T fill = T{0}) : n_(n), data_(n * n, fill) {}

    basic_matrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()) {
        data_.reserve(n_ * n_);
        for (const auto& row : rows) {
            if (row.size() != n_) {
                throw dimension_error("matrix literal is not square");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    /// Builds from nested rows, rejecting ragged, empty, or non-finite input.
    static basic_matrix checked(const std::vector<std::vector<T>>& rows) {
        if (rows.empty()) {
            throw dimension_error("matrix must have n >= 1");
        }
        basic_matrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) {
                throw dimension_error("row " + std::to_string(i) + " has " +
                                      std::to_string(rows[i].size()) + " entries, expected " +
                                      std::to_string(rows.size()));
            }
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (!std::isfinite(static_cast<double>(rows[i][j]))) {
                    throw domain_error("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                       ") is not finite");
                }
                m(i, j) = rows[i][j];
            }
        }
        return m;
    }

    static basic_matrix identity(std::size_t n) {
        basic_matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    static basic_matrix diagonal(std::span<const T> d) {
        basic_matrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static basic_matrix diagonal(std::initializer_list<T> d) {
        return diagonal(std::span<const T>(d.begin(), d.size()));
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    [[nodiscard]] std::span<const T> data() const noexcept { return data_; }

    [[nodiscard]] std::vector<std::vector<T>> rows() const {
        std::vector<std::vector<T>> out(n_, std::vector<T>(n_));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
        return out;
    }

    [[nodiscard]] basic_matrix transpose() const {
        basic_matrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    /// (M + Mᵀ)/2
    [[nodiscard]] basic_matrix symmetrized() const {
        basic_matrix s(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) s(i, j) = ((*this)(i, j) + (*this)(j, i)) / T{2};
        return s;
    }

    [[nodiscard]] T trace() const noexcept {
        T s{0};
        for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    [[nodiscard]] T frobenius_norm() const noexcept {
        T s{0};
        for (const T& v : data_) s += v * v;
        return sqrt(s);
    }

    [[nodiscard]] bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(),
                           [](const T& v) { return std::isfinite(static_cast<double>(v)); });
    }

    template <typename U>
    [[nodiscard]] basic_matrix<U> cast() const {
        basic_matrix<U> out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) out(i, j) = static_cast<U>((*this)(i, j));
        return out;
    }

    basic_matrix& operator+=(const basic_matrix& o) {
        require_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }

    basic_matrix& operator-=(const basic_matrix& o) {
        require_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }

    basic_matrix& operator*=(T s) noexcept {
        for (T& v : data_) v *= s;
        return *this;
    }

    friend basic_matrix operator+(basic_matrix a, const basic_matrix& b) { return a += b; }
    friend basic_matrix operator-(basic_matrix a, const basic_matrix& b) { return a -= b; }
    friend basic_matrix operator*(basic_matrix a, T s) { return a *= s; }
    friend basic_matrix operator*(T s, basic_matrix a) { return a *= s; }

    friend basic_matrix operator*(const basic_matrix& a, const basic_matrix& b) {
        a.require_same(b);
        const std::size_t n = a.n_;
        basic_matrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend bool operator==(const basic_matrix&, const basic_matrix&) = default;

private:
    void require_same(const basic_matrix& o) const {
        if (o.n_ != n_) {
            throw dimension_error("matrix dimensions differ: " + std::to_string(n_) + " vs " +
                                  std::to_string(o.n_));
        }
    }

    std::size_t n_ = 0;
    std::vector<T> data_;
};

using matrix = basic_matrix<double>;

/// ‖M − Mᵀ‖_F
template <typename T>
T symmetry_defect(const basic_matrix<T>& m) {
    T s{0};
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            const T d = m(i, j) - m(j, i);
            s += T{2} * d * d;
        }
    return sqrt(s);
}

template <typename T>
T max_abs_diff(const basic_matrix<T>& a, const basic_matrix<T>& b) {
    if (a.size() != b.size()) throw dimension_error("matrix dimensions differ");
    T m{0};
    for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, abs(a.data()[k] - b.data()[k]));
    return m;
}

/// X·S·Xᵀ evaluated and then symmetrized; S is assumed symmetric.
template <typename T>
basic_matrix<T> congruence(const basic_matrix<T>& x, const basic_matrix<T>& s) {
    return (x * s * x.transpose()).symmetrized();
}

} // namespace detlab
