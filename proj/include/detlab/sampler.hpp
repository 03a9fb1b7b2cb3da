#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "detlab/error.hpp"
#include "detlab/matrix.hpp"

namespace detlab {

/// SplitMix64 (Steele, Lea & Flood 2014). Fixed constants make every seed
/// reproducible across platforms and languages.
class splitmix64 {
public:
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr splitmix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t next() noexcept {
        state_ += golden_gamma;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal by the Box–Muller transform; one draw consumes two
    /// uniforms and the sine branch is discarded.
    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

/// Seed of trial `trial_index` under `master_seed`. Pure, so trials can be
/// generated in any order. (0, 0) maps to 0xE220A8397B1DCDAF, the first
/// SplitMix64 output for seed 0.
constexpr std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
    return splitmix64::mix(splitmix64::mix(master_seed) + (trial_index + 1) * splitmix64::golden_gamma);
}

enum class sampler_kind { wishart, spectrum_controlled, rank_deficient };

inline constexpr std::string_view to_string(sampler_kind k) noexcept {
    switch (k) {
    case sampler_kind::wishart: return "wishart";
    case sampler_kind::spectrum_controlled: return "spectrum_controlled";
    case sampler_kind::rank_deficient: return "rank_deficient";
    }
    return "unknown";
}

inline sampler_kind parse_sampler_kind(std::string_view text) {
    if (text == "wishart") return sampler_kind::wishart;
    if (text == "spectrum_controlled") return sampler_kind::spectrum_controlled;
    if (text == "rank_deficient") return sampler_kind::rank_deficient;
    throw parse_error("unknown sampler kind '" + std::string(text) + "'");
}

struct sampler_spec {
    sampler_kind kind = sampler_kind::wishart;
    std::size_t n = 2;
    double cond = 1e3;      ///< λ₁/λₙ, spectrum_controlled only
    std::size_t rank = 1;   ///< rank_deficient only
    std::uint64_t seed = 0;

    friend bool operator==(const sampler_spec&, const sampler_spec&) = default;
};

inline void validate(const sampler_spec& spec) {
    if (spec.n < 1) throw domain_error("sampler: n must be >= 1");
    if (spec.kind == sampler_kind::spectrum_controlled && !(spec.cond >= 1.0 && std::isfinite(spec.cond))) {
        throw domain_error("sampler: cond must be a finite number >= 1");
    }
    if (spec.kind == sampler_kind::rank_deficient && (spec.rank < 1 || spec.rank > spec.n)) {
        throw domain_error("sampler: rank must lie in [1, n]");
    }
}

namespace detail {

// n×cols standard normal matrix, filled row by row.
inline std::vector<double> gaussian_block(splitmix64& rng, std::size_t n, std::size_t cols) {
    std::vector<double> g(n * cols);
    for (double& v : g) v = rng.normal();
    return g;
}

inline matrix outer_gram(const std::vector<double>& g, std::size_t n, std::size_t cols) {
    matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < cols; ++c) s += g[i * cols + c] * g[j * cols + c];
            m(i, j) = s;
            m(j, i) = s;
        }
    return m;
}

// Orthogonal factor of a Gaussian matrix by modified Gram–Schmidt, which
// keeps R's diagonal positive and hence Q unique.
inline matrix random_orthogonal(splitmix64& rng, std::size_t n) {
    const auto g = gaussian_block(rng, n, n);
    std::vector<std::vector<double>> cols(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) cols[j][i] = g[i * n + j];
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += cols[k][i] * cols[j][i];
            for (std::size_t i = 0; i < n; ++i) cols[j][i] -= dot * cols[k][i];
        }
        double norm = 0.0;
        for (double v : cols[j]) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : cols[j]) v /= norm;
    }
    matrix q(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = cols[j][i];
    return q;
}

} // namespace detail

/// Draws a symmetric positive semidefinite matrix; a pure function of `spec`.
///
/// - wishart: G·Gᵀ, G an n×n standard normal matrix
/// - spectrum_controlled: Q·diag(λ)·Qᵀ with λ₁ = 1, λₙ = 1/cond and the
///   interior log-uniform in between
/// - rank_deficient: G·Gᵀ with G of size n×rank
inline matrix sample_psd(const sampler_spec& spec) {
    validate(spec);
    splitmix64 rng(spec.seed);
    const std::size_t n = spec.n;
    switch (spec.kind) {
    case sampler_kind::wishart: return detail::outer_gram(detail::gaussian_block(rng, n, n), n, n);
    case sampler_kind::rank_deficient:
        return detail::outer_gram(detail::gaussian_block(rng, n, spec.rank), n, spec.rank);
    case sampler_kind::spectrum_controlled: {
        const matrix q = detail::random_orthogonal(rng, n);
        const double log_cond = std::log(spec.cond);
        std::vector<double> lambda(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0) lambda[i] = 1.0;
            else if (i + 1 == n) lambda[i] = 1.0 / spec.cond;
            else lambda[i] = std::exp(-rng.uniform() * log_cond);
        }
        matrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += q(i, k) * lambda[k] * q(j, k);
                m(i, j) = s;
                m(j, i) = s;
            }
        return m;
    }
    }
    throw domain_error("sampler: unknown kind");
}

} // namespace detlab
