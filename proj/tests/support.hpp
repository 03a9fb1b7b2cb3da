#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "detlab/detlab.hpp"
#include "oracles.hpp"

namespace support {

inline detlab::matrix sample(detlab::sampler_kind kind, std::size_t n, std::uint64_t seed, double cond = 1e3,
                             std::size_t rank = 0) {
    detlab::sampler_spec s;
    s.kind = kind;
    s.n = n;
    s.cond = cond;
    s.rank = rank == 0 ? (n > 1 ? n - 1 : 1) : rank;
    s.seed = seed;
    return detlab::sample_psd(s);
}

/// Wishart draw, which is positive definite with probability one.
inline detlab::matrix random_pd(std::size_t n, std::uint64_t seed) {
    return sample(detlab::sampler_kind::wishart, n, seed);
}

/// Square matrix with independent standard normal entries.
inline detlab::matrix random_general(std::size_t n, std::uint64_t seed) {
    detlab::splitmix64 rng(seed);
    detlab::matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.normal();
    return m;
}

template <typename T = double>
oracle::dense<T> to_dense(const detlab::matrix& m) {
    oracle::dense<T> out(m.size(), std::vector<T>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = static_cast<T>(m(i, j));
    return out;
}

template <typename T>
detlab::matrix from_dense(const oracle::dense<T>& d) {
    detlab::matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = static_cast<double>(d[i][j]);
    return m;
}

inline double rel_diff(const detlab::matrix& a, const detlab::matrix& b) {
    return (a - b).frobenius_norm() / std::max(1.0, b.frobenius_norm());
}

inline bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace support
