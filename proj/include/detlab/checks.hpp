#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "detlab/error.hpp"
#include "detlab/linalg.hpp"
#include "detlab/majorization.hpp"
#include "detlab/matrix.hpp"
#include "detlab/means.hpp"
#include "detlab/tolerance.hpp"

namespace detlab {

/// Stable identifiers of the checked statements; the string forms are part
/// of the report schema.
enum class check_id {
    eq1_polar,
    thm1,
    thm2,
    thm3,
    eq5_logmaj,
    eq6_p2,
    lemma1,
    norm_chain,
    thm4,
    weyl,
    even_power,
    conj1,
    conj2,
};

inline constexpr std::array<check_id, 13> all_check_ids{
    check_id::eq1_polar, check_id::thm1,     check_id::thm2,       check_id::thm3, check_id::eq5_logmaj,
    check_id::eq6_p2,    check_id::lemma1,   check_id::norm_chain, check_id::thm4, check_id::weyl,
    check_id::even_power, check_id::conj1,   check_id::conj2,
};

inline constexpr std::string_view to_string(check_id id) noexcept {
    switch (id) {
    case check_id::eq1_polar: return "eq1_polar";
    case check_id::thm1: return "thm1";
    case check_id::thm2: return "thm2";
    case check_id::thm3: return "thm3";
    case check_id::eq5_logmaj: return "eq5_logmaj";
    case check_id::eq6_p2: return "eq6_p2";
    case check_id::lemma1: return "lemma1";
    case check_id::norm_chain: return "norm_chain";
    case check_id::thm4: return "thm4";
    case check_id::weyl: return "weyl";
    case check_id::even_power: return "even_power";
    case check_id::conj1: return "conj1";
    case check_id::conj2: return "conj2";
    }
    return "unknown";
}

inline check_id parse_check_id(std::string_view text) {
    for (check_id id : all_check_ids) {
        if (to_string(id) == text) return id;
    }
    throw parse_error("unknown check id '" + std::string(text) + "'");
}

/// Open conjectures: failures there are discoveries, not regressions.
inline constexpr bool is_conjecture(check_id id) noexcept {
    return id == check_id::conj1 || id == check_id::conj2;
}

inline constexpr bool is_proven(check_id id) noexcept { return !is_conjecture(id); }

enum class parameter_kind { none, p, t, k };

inline constexpr parameter_kind parameter_of(check_id id) noexcept {
    switch (id) {
    case check_id::thm3:
    case check_id::conj1:
    case check_id::conj2: return parameter_kind::p;
    case check_id::eq5_logmaj:
    case check_id::eq6_p2: return parameter_kind::t;
    case check_id::even_power: return parameter_kind::k;
    default: return parameter_kind::none;
    }
}

enum class verdict { pass, fail, warn };

inline constexpr std::string_view to_string(verdict v) noexcept {
    switch (v) {
    case verdict::pass: return "pass";
    case verdict::fail: return "fail";
    case verdict::warn: return "warn";
    }
    return "unknown";
}

inline verdict parse_verdict(std::string_view text) {
    if (text == "pass") return verdict::pass;
    if (text == "fail") return verdict::fail;
    if (text == "warn") return verdict::warn;
    throw parse_error("unknown verdict '" + std::string(text) + "'");
}

struct check_params {
    std::optional<double> p;
    std::optional<double> t;
    std::optional<int> k;
    /// Set when p lies outside the range the statement is made for.
    bool out_of_range = false;

    friend bool operator==(const check_params&, const check_params&) = default;
};

using side_value = std::variant<double, std::vector<double>>;

/// One inequality verdict. `lhs`/`rhs` follow the order in which the
/// statement is written; `margin` is positive when it holds with room.
struct check_result {
    check_id id = check_id::thm1;
    check_params params;
    side_value lhs = 0.0;
    side_value rhs = 0.0;
    double margin = 0.0;
    double raw_margin = 0.0;
    verdict outcome = verdict::pass;
    tolerance tol_used;
    std::map<std::string, double> details;

    [[nodiscard]] bool passed() const noexcept { return outcome == verdict::pass; }
};

struct check_options {
    tolerance tol = default_tolerance();
    /// Relative shift used to make singular operands positive definite.
    double eps = 1e-10;
};

namespace detail {

/// Main evaluation type. A second pass in double gives the rounding-error
/// estimate that decides whether a failing verdict is trustworthy.
using check_real = long double;

template <typename T>
struct operands {
    basic_matrix<T> a;
    basic_matrix<T> b;
};

struct prepared_pair {
    operands<check_real> ops;
    bool a_regularized = false;
    bool b_regularized = false;
    check_real a_condition = 1;
    check_real b_condition = 1;
};

inline basic_matrix<check_real> prepare_operand(const matrix& m, const check_options& opts, const char* name,
                                                bool& regularized, check_real& condition) {
    if (m.size() == 0) throw dimension_error(std::string(name) + " is empty");
    if (!m.all_finite()) throw domain_error(std::string(name) + " has non-finite entries");
    auto x = m.cast<check_real>();
    if (!is_psd(x, opts.tol)) {
        throw not_psd_error(std::string(name) + " is not positive semidefinite");
    }
    x = x.symmetrized();
    const auto ev = sym_eigenvalues(x, opts.tol);
    const check_real top = std::max(ev.front(), check_real{0});
    regularized = !(ev.back() > static_cast<check_real>(opts.eps) * top);
    if (regularized) x = regularize(x, opts.eps);
    condition = condition_number(x, opts.tol);
    return x;
}

inline prepared_pair prepare(const matrix& a, const matrix& b, const check_options& opts) {
    if (a.size() != b.size()) throw dimension_error("A and B have different dimensions");
    validate(opts.tol);
    if (!(opts.eps > 0.0) || !std::isfinite(opts.eps)) throw domain_error("regularization eps must be positive");
    prepared_pair in;
    in.ops.a = prepare_operand(a, opts, "A", in.a_regularized, in.a_condition);
    in.ops.b = prepare_operand(b, opts, "B", in.b_regularized, in.b_condition);
    return in;
}

/// A quantity compared against a threshold: it passes iff value ≥ −threshold.
/// Logarithmic terms are sums of logs, whose errors are relative errors.
struct decision_term {
    double value = 0.0;
    double threshold = 0.0;
    bool logarithmic = false;
    double error_bound = 0.0;  ///< a-posteriori rounding bound, when one is known
};

/// Result of one evaluation pass plus the quantities its verdict rests on.
struct evaluation {
    explicit evaluation(const tolerance& t) : tol(t) {}

    tolerance tol;
    check_result result;
    std::vector<decision_term> terms;
    bool accuracy_warning = false;
};

template <typename T>
double d(const T& v) {
    return static_cast<double>(v);
}

template <typename T>
T scaled(const T& raw, const T& favored) {
    return raw / std::max(abs(favored), T{1});
}

/// Determinant-type verdict where `favored` is claimed ≥ `other`.
template <typename T>
void settle_scalar(evaluation& e, const T& lhs, const T& rhs, const T& favored, const T& other) {
    auto& r = e.result;
    r.lhs = d(lhs);
    r.rhs = d(rhs);
    const T raw = favored - other;
    r.raw_margin = d(raw);
    r.margin = d(scaled(raw, favored));
    const double thr = e.tol.at_scale(std::max(abs(d(lhs)), abs(d(rhs))));
    r.outcome = r.raw_margin >= -thr ? verdict::pass : verdict::fail;
    e.terms.push_back({r.raw_margin, thr});
}

inline void push_majorization_terms(evaluation& e, const majorization_verdict& v, bool strict, bool logarithmic,
                                   double error_bound = 0.0) {
    e.terms.push_back({v.slack, v.threshold, logarithmic, error_bound});
    if (strict) e.terms.push_back({-v.equality_defect, v.threshold, logarithmic, error_bound});
}

/// The error model is only good to a small factor; a decision counts as
/// resolved when it survives ten times the estimated error.
inline constexpr double resolution_safety = 10.0;

/// Bound on the error of any partial sum of log xᵢ when each xᵢ carries the
/// absolute error n·u·x₁ of a backward-stable eigen- or singular-value
/// solver: the relative error of xᵢ is then n·u·x₁/xᵢ.
template <typename T>
double log_spectrum_error(const basic_eigenvalue_vector<T>& x) {
    const double u = static_cast<double>(std::numeric_limits<T>::epsilon());
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > T{0})) return std::numeric_limits<double>::infinity();
        sum += d(x[0] / x[i]);
    }
    return n * u * sum * resolution_safety;
}

template <typename T>
void settle_majorization(evaluation& e, const basic_eigenvalue_vector<T>& lhs, const basic_eigenvalue_vector<T>& rhs,
                         const majorization_verdict& v, bool logarithmic) {
    auto& r = e.result;
    r.lhs = lhs.to_double();
    r.rhs = rhs.to_double();
    r.margin = v.slack;
    r.raw_margin = v.slack;
    r.details["worst_k"] = static_cast<double>(v.worst_k);
    r.details["equality_defect"] = v.equality_defect;
    r.details["threshold"] = v.threshold;
    r.outcome = v.holds ? verdict::pass : verdict::fail;
    const double bound = logarithmic ? log_spectrum_error(lhs) + log_spectrum_error(rhs) : 0.0;
    push_majorization_terms(e, v, true, logarithmic, bound);
}

template <typename T>
basic_matrix<T> square(const basic_matrix<T>& a) {
    return (a * a).symmetrized();
}

/// Spectrum of a matrix that is positive definite in exact arithmetic;
/// rounding-level negatives are reported as 0.
template <typename T>
basic_eigenvalue_vector<T> pd_spectrum(const basic_matrix<T>& m, const tolerance& tol) {
    auto ev = sym_eigenvalues(m, tol);
    for (T& v : ev) v = std::max(v, T{0});
    return basic_eigenvalue_vector<T>(std::move(ev));
}

/// Tolerance for the multiplicative predicates inside the checks. The
/// operands are positive definite after preparation, so no entry is zero by
/// tolerance; only exact zeros count as log 0 = −∞.
inline tolerance log_tolerance(const tolerance& tol) { return {tol.rel, 0.0}; }

/// (det(I+X) − det(I+Y))/max(|det(I+X)|, 1) together with its threshold.
template <typename T>
decision_term p2_term(const tolerance& tol, const basic_matrix<T>& x, const basic_matrix<T>& y) {
    const auto id = basic_matrix<T>::identity(x.size());
    const T dx = det_general(id + x);
    const T dy = det_general(id + y);
    return {d(scaled(dx - dy, dx)), tol.at_scale(std::max(abs(d(dx)), abs(d(dy)))) / std::max(abs(d(dx)), 1.0)};
}

/// Records "premise ⇒ consequence ≥ −threshold" under `<name>_margin` and
/// `<name>_implication_ok`.
inline void record_implication(evaluation& e, const std::string& name, const majorization_verdict& premise,
                               const decision_term& consequence) {
    e.result.details[name + "_margin"] = consequence.value;
    const bool ok = !premise.holds || consequence.value >= -consequence.threshold;
    e.result.details[name + "_implication_ok"] = ok ? 1.0 : 0.0;
    push_majorization_terms(e, premise, false, true);
    e.terms.push_back(consequence);
}

inline double require_p(const check_params& params, const char* who) {
    if (!params.p) throw domain_error(std::string(who) + ": parameter p is required");
    const double p = *params.p;
    if (!std::isfinite(p) || p < 0.0) throw domain_error(std::string(who) + ": p must be >= 0");
    return p;
}

inline mean_weight require_t(const check_params& params, const char* who) {
    if (!params.t) throw domain_error(std::string(who) + ": parameter t is required");
    return mean_weight{*params.t};
}

inline int require_k(const check_params& params, const char* who) {
    if (!params.k || *params.k < 1) throw domain_error(std::string(who) + ": k must be a positive integer");
    return *params.k;
}

/// Ratio of the unit roundoffs of the main and the probe evaluation type.
inline constexpr double precision_gain =
    static_cast<double>(std::numeric_limits<check_real>::epsilon()) / std::numeric_limits<double>::epsilon();

// Estimated error of the main-precision value of one decision quantity.
// Rounding error scales with the unit roundoff, so the gap to the double
// pass shrinks by `precision_gain`. That model only holds while the double
// pass is still accurate to within half the quantity's natural scale (its
// magnitude, or 1 for a sum of logarithms); beyond that the double pass has
// lost all digits and bounds nothing. Operands are positive definite, so a
// non-finite value always stems from rounding.
inline double term_error(const decision_term& hi, const decision_term& lo) {
    constexpr double unbounded = std::numeric_limits<double>::infinity();
    if (!std::isfinite(hi.value) || !std::isfinite(lo.value)) return unbounded;
    const double gap = abs(hi.value - lo.value);
    const double natural_scale = hi.logarithmic ? 1.0 : std::max(abs(hi.value), hi.threshold);
    if (gap > 0.5 * natural_scale) return unbounded;
    return gap * precision_gain * resolution_safety;
}

/// Runs `eval` in long double and again in double on the same prepared
/// operands, then decides whether the verdict is resolved: a decision is
/// resolved when its estimated rounding error is smaller than its distance
/// from the threshold. An unresolved failure becomes `warn`.
template <typename Eval>
check_result evaluate(check_id id, check_params params, const matrix& a, const matrix& b,
                      const check_options& opts, Eval&& eval) {
    const auto in = prepare(a, b, opts);
    evaluation hi = eval(in.ops);
    std::optional<evaluation> lo;
    try {
        lo = eval(operands<double>{in.ops.a.template cast<double>(), in.ops.b.template cast<double>()});
    } catch (const error&) {
        // The double pass breaking down is itself evidence of ill-conditioning.
    }

    double worst = 0.0;
    bool resolved = lo.has_value() && lo->terms.size() == hi.terms.size();
    if (resolved) {
        for (std::size_t i = 0; i < hi.terms.size(); ++i) {
            const double err = std::max(term_error(hi.terms[i], lo->terms[i]), hi.terms[i].error_bound);
            worst = std::max(worst, err);
            if (!(err < abs(hi.terms[i].value + hi.terms[i].threshold))) resolved = false;
        }
    } else {
        worst = std::numeric_limits<double>::infinity();
    }

    check_result r = std::move(hi.result);
    r.id = id;
    r.params = params;
    r.tol_used = opts.tol;
    r.details["a_regularized"] = in.a_regularized ? 1.0 : 0.0;
    r.details["b_regularized"] = in.b_regularized ? 1.0 : 0.0;
    // Conditioning guard on the pair: products such as A^{-1/2}BA^{-1/2}
    // inherit κ(A)·κ(B), and beyond the limit their small eigenvalues are
    // truncated alike in both passes, which the comparison cannot see.
    const double pair_condition = d(in.a_condition * in.b_condition);
    const bool warning = hi.accuracy_warning || !(pair_condition <= mean_condition_limit);
    r.details["pair_condition"] = pair_condition;
    r.details["accuracy_warning"] = warning ? 1.0 : 0.0;
    r.details["precision_resolved"] = resolved ? 1.0 : 0.0;
    r.details["rounding_estimate"] = worst;
    if (r.outcome == verdict::fail && (!resolved || warning)) r.outcome = verdict::warn;
    return r;
}

} // namespace detail

/// det(A+UᵀB) ≤ det(A+B) with U the orthogonal polar factor of BA. Also
/// records the defect of det(A²+|BA|) = det(A+UᵀB)·det A.
inline check_result check_polar_form(const matrix& a, const matrix& b, const check_options& opts = {}) {
    using namespace detail;
    return evaluate(check_id::eq1_polar, {}, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto u = polar_unitary(in.b * in.a, opts.tol);
        const auto lhs = det_general(in.a + u.transpose() * in.b);
        const auto rhs = det_general(in.a + in.b);
        settle_scalar(e, lhs, rhs, rhs, lhs);

        const auto thm1_lhs = det_general(square(in.a) + abs_value(in.b * in.a, opts.tol));
        const auto defect = abs(thm1_lhs - lhs * det_general(in.a));
        auto& det = e.result.details;
        det["identity_defect"] = d(defect);
        det["identity_defect_scaled"] = d(scaled(defect, thm1_lhs));
        det["orthogonality_defect"] =
            d((u.transpose() * u - std::decay_t<decltype(u)>::identity(u.size())).frobenius_norm());
        return e;
    });
}

/// det(A²+|BA|) ≤ det(A²+AB)
inline check_result check_thm1(const matrix& a, const matrix& b, const check_options& opts = {}) {
    using namespace detail;
    return evaluate(check_id::thm1, {}, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto a2 = square(in.a);
        const auto lhs = det_general(a2 + abs_value(in.b * in.a, opts.tol));
        const auto rhs = det_general(a2 + in.a * in.b);
        settle_scalar(e, lhs, rhs, rhs, lhs);
        return e;
    });
}

/// det(A²+|AB|) ≥ det(A²+AB)
inline check_result check_thm2(const matrix& a, const matrix& b, const check_options& opts = {}) {
    using namespace detail;
    return evaluate(check_id::thm2, {}, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto a2 = square(in.a);
        const auto lhs = det_general(a2 + abs_value(in.a * in.b, opts.tol));
        const auto rhs = det_general(a2 + in.a * in.b);
        settle_scalar(e, lhs, rhs, lhs, rhs);
        return e;
    });
}

/// det(A²+|BA|ᵖ) ≤ det(A²+AᵖBᵖ), stated for 0 ≤ p ≤ 2.
///
/// Larger p is evaluated and flagged out_of_range. The |AB|ᵖ orientation is
/// stored alongside as `lhs_ab` / `margin_ab`.
inline check_result check_thm3(const matrix& a, const matrix& b, const check_params& params,
                               const check_options& opts = {}) {
    using namespace detail;
    const double p = require_p(params, "thm3");
    check_params used;
    used.p = p;
    used.out_of_range = p > 2.0;
    return evaluate(check_id::thm3, used, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto a2 = square(in.a);
        const auto lhs_m = a2 + abs_power(in.b * in.a, p, opts.tol);
        const auto rhs_m = a2 + psd_power(in.a, p, opts.tol) * psd_power(in.b, p, opts.tol);
        const auto lhs = det_general(lhs_m);
        const auto rhs = det_general(rhs_m);
        settle_scalar(e, lhs, rhs, rhs, lhs);

        const auto lhs_ab = det_general(a2 + abs_power(in.a * in.b, p, opts.tol));
        auto& det = e.result.details;
        det["lhs_ab"] = d(lhs_ab);
        det["margin_ab"] = d(scaled(rhs - lhs_ab, rhs));
        det["trace_lhs"] = d(lhs_m.trace());
        det["trace_rhs"] = d(rhs_m.trace());
        return e;
    });
}

/// λ(A^{1−t}Bᵗ) ≻_log λ(A♯ₜB); the det(I+·) consequence is recorded as `p2`.
inline check_result check_geo_mean_logmaj(const matrix& a, const matrix& b, const check_params& params,
                                          const check_options& opts = {}) {
    using namespace detail;
    const mean_weight t = require_t(params, "eq5_logmaj");
    check_params used;
    used.t = t.value();
    return evaluate(check_id::eq5_logmaj, used, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto mean = sharp(in.a, in.b, t, opts.tol);
        const auto a_pow = psd_power(in.a, 1.0 - t.value(), opts.tol);
        const auto b_pow = psd_power(in.b, t.value(), opts.tol);
        const auto x = spectrum_of_product(a_pow, b_pow, opts.tol);
        const auto y = pd_spectrum(mean.value, opts.tol);
        settle_majorization(e, x, y, log_majorizes(x, y, log_tolerance(opts.tol)), true);
        record_implication(e, "p2", weak_log_majorizes(x, y, log_tolerance(opts.tol)), p2_term(opts.tol, a_pow * b_pow, mean.value));
        e.accuracy_warning = mean.accuracy_warning;
        return e;
    });
}

/// det(I+A♯ₜB) ≤ det(I+A^{1−t}Bᵗ)
inline check_result check_p2_consequence(const matrix& a, const matrix& b, const check_params& params,
                                         const check_options& opts = {}) {
    using namespace detail;
    const mean_weight t = require_t(params, "eq6_p2");
    check_params used;
    used.t = t.value();
    return evaluate(check_id::eq6_p2, used, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto id = std::decay_t<decltype(in.a)>::identity(in.a.size());
        const auto mean = sharp(in.a, in.b, t, opts.tol);
        const auto a_pow = psd_power(in.a, 1.0 - t.value(), opts.tol);
        const auto b_pow = psd_power(in.b, t.value(), opts.tol);
        const auto lhs = det_general(id + mean.value);
        const auto rhs = det_general(id + a_pow * b_pow);
        settle_scalar(e, lhs, rhs, rhs, lhs);

        const auto premise =
            weak_log_majorizes(spectrum_of_product(a_pow, b_pow, opts.tol), pd_spectrum(mean.value, opts.tol),
                               log_tolerance(opts.tol));
        e.result.details["logmaj_holds"] = premise.holds ? 1.0 : 0.0;
        e.result.details["p2_implication_ok"] = (!premise.holds || e.result.outcome == verdict::pass) ? 1.0 : 0.0;
        push_majorization_terms(e, premise, false, true);
        e.accuracy_warning = mean.accuracy_warning;
        return e;
    });
}

/// λ(A♮B) ≻_log λ(A^{1/2}B^{1/2}); also records det(I+A♮B) ≥ det(I+A^{1/2}B^{1/2})
/// and the factorization A♮B = A^{1/2}B^{1/2}(A♯B)^{-1}B^{1/2}A^{1/2}.
inline check_result check_lemma1(const matrix& a, const matrix& b, const check_options& opts = {}) {
    using namespace detail;
    return evaluate(check_id::lemma1, {}, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto nat = natural(in.a, in.b, mean_weight{0.5}, opts.tol);
        const auto a_half = psd_power(in.a, 0.5, opts.tol);
        const auto b_half = psd_power(in.b, 0.5, opts.tol);
        const auto x = pd_spectrum(nat.value, opts.tol);
        const auto y = spectrum_of_product(a_half, b_half, opts.tol);
        settle_majorization(e, x, y, log_majorizes(x, y, log_tolerance(opts.tol)), true);
        record_implication(e, "p2", weak_log_majorizes(x, y, log_tolerance(opts.tol)), p2_term(opts.tol, nat.value, a_half * b_half));

        const auto geo = sharp(in.a, in.b, mean_weight{0.5}, opts.tol);
        const auto factored = congruence(a_half * b_half, psd_power(geo.value, -1.0, opts.tol));
        e.result.details["factorization_defect"] =
            d((nat.value - factored).frobenius_norm()) / std::max(d(nat.value.frobenius_norm()), 1.0);
        e.accuracy_warning = nat.accuracy_warning || geo.accuracy_warning;
        return e;
    });
}

/// The spectral-norm chain behind the lemma, with X = A^{1/2}B^{1/2}, H = A♯B:
///   ‖A♮B‖ ≥ ‖X‖,  ‖X‖² ≤ ‖H‖·‖XH⁻¹Xᵀ‖,  ‖H‖ ≤ λ₁(X) ≤ ‖X‖.
/// `lhs`/`rhs` list the larger/smaller side of each link in that order.
inline check_result check_norm_chain(const matrix& a, const matrix& b, const check_options& opts = {}) {
    using namespace detail;
    return evaluate(check_id::norm_chain, {}, a, b, opts, [&](const auto& in) {
        using T = typename std::decay_t<decltype(in.a)>::value_type;
        evaluation e(opts.tol);
        const auto nat = natural(in.a, in.b, mean_weight{0.5}, opts.tol);
        const auto geo = sharp(in.a, in.b, mean_weight{0.5}, opts.tol);
        const auto a_half = psd_power(in.a, 0.5, opts.tol);
        const auto b_half = psd_power(in.b, 0.5, opts.tol);
        const auto x = a_half * b_half;
        const auto& h = geo.value;

        const T norm_nat = spectral_norm(nat.value);
        const T norm_x = spectral_norm(x);
        const T norm_h = spectral_norm(h);
        const T norm_schur = spectral_norm(congruence(x, psd_power(h, -1.0, opts.tol)));
        const T lambda1_x = spectrum_of_product(a_half, b_half, opts.tol)[0];

        const std::array<T, 4> bigger{norm_nat, norm_h * norm_schur, lambda1_x, norm_x};
        const std::array<T, 4> smaller{norm_x, norm_x * norm_x, norm_h, lambda1_x};
        const std::array<const char*, 4> names{"link_natural_norm", "link_schur", "link_sharp_lambda1",
                                               "link_lambda1_norm"};

        auto& r = e.result;
        std::vector<double> lhs, rhs;
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (std::size_t i = 0; i < bigger.size(); ++i) {
            const T raw = bigger[i] - smaller[i];
            const double margin = d(scaled(raw, bigger[i]));
            const double thr = opts.tol.at_scale(std::max(d(bigger[i]), d(smaller[i])));
            r.details[names[i]] = margin;
            lhs.push_back(d(bigger[i]));
            rhs.push_back(d(smaller[i]));
            ok = ok && d(raw) >= -thr;
            e.terms.push_back({d(raw), thr});
            if (margin < worst) {
                worst = margin;
                r.raw_margin = d(raw);
            }
        }
        r.lhs = lhs;
        r.rhs = rhs;
        r.margin = worst;
        r.outcome = ok ? verdict::pass : verdict::fail;
        e.accuracy_warning = nat.accuracy_warning || geo.accuracy_warning;
        return e;
    });
}

/// det(A²+|AB|²) ≥ det(A²+A²B²)
inline check_result check_thm4(const matrix& a, const matrix& b, const check_options& opts = {}) {
    using namespace detail;
    return evaluate(check_id::thm4, {}, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto a2 = square(in.a);
        const auto lhs = det_general(a2 + gram(in.a * in.b));
        const auto rhs = det_general(a2 + a2 * square(in.b));
        settle_scalar(e, lhs, rhs, lhs, rhs);
        return e;
    });
}

/// λ(|ABA⁻¹|) ≻_log λ(B); also records det(I+|ABA⁻¹|²) ≥ det(I+B²).
inline check_result check_weyl_logmaj(const matrix& a, const matrix& b, const check_options& opts = {}) {
    using namespace detail;
    return evaluate(check_id::weyl, {}, a, b, opts, [&](const auto& in) {
        using T = typename std::decay_t<decltype(in.a)>::value_type;
        evaluation e(opts.tol);
        const auto similar = in.a * in.b * psd_power(in.a, -1.0, opts.tol);
        const basic_eigenvalue_vector<T> x(singular_values(similar));
        const auto y = pd_spectrum(in.b, opts.tol);
        settle_majorization(e, x, y, log_majorizes(x, y, log_tolerance(opts.tol)), true);
        record_implication(e, "p2", weak_log_majorizes(x, y, log_tolerance(opts.tol)),
                           p2_term(opts.tol, gram(similar), square(in.b)));
        return e;
    });
}

/// λ(A²+|BA|^{2k}) ≻ λ(A²+|AB|^{2k}) and its determinant consequence
/// det(A²+|AB|^{2k}) ≥ det(A²+|BA|^{2k}). `lhs`/`rhs` are the determinants.
inline check_result check_even_power(const matrix& a, const matrix& b, const check_params& params,
                                     const check_options& opts = {}) {
    using namespace detail;
    const int k = require_k(params, "even_power");
    check_params used;
    used.k = k;
    return evaluate(check_id::even_power, used, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto a2 = square(in.a);
        const auto x = a2 + abs_power(in.b * in.a, 2.0 * k, opts.tol);
        const auto y = a2 + abs_power(in.a * in.b, 2.0 * k, opts.tol);

        const auto maj = majorizes(spectrum(x, opts.tol), spectrum(y, opts.tol), opts.tol);
        const auto det_x = det_general(x);
        const auto det_y = det_general(y);
        settle_scalar(e, det_y, det_x, det_y, det_x);
        push_majorization_terms(e, maj, true, false);
        auto& r = e.result;
        const double det_margin = r.margin;
        const bool det_ok = r.outcome == verdict::pass;

        const double trace_scale = std::max(1.0, d(x.trace()));
        r.details["det_margin"] = det_margin;
        r.details["maj_slack"] = maj.slack;
        r.details["maj_equality_defect"] = maj.equality_defect;
        r.details["maj_holds"] = maj.holds ? 1.0 : 0.0;
        r.details["p1_implication_ok"] = (!maj.holds || det_ok) ? 1.0 : 0.0;
        r.margin = std::min(det_margin, maj.slack / trace_scale);
        r.outcome = (det_ok && maj.holds) ? verdict::pass : verdict::fail;
        return e;
    });
}

/// Open: det(A²+|AB|ᵖ) ≥ det(A²+AᵖBᵖ) for 0 ≤ p ≤ 2.
inline check_result check_conjecture1(const matrix& a, const matrix& b, const check_params& params,
                                      const check_options& opts = {}) {
    using namespace detail;
    const double p = require_p(params, "conj1");
    check_params used;
    used.p = p;
    used.out_of_range = p > 2.0;
    return evaluate(check_id::conj1, used, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto a2 = square(in.a);
        const auto lhs = det_general(a2 + abs_power(in.a * in.b, p, opts.tol));
        const auto rhs = det_general(a2 + psd_power(in.a, p, opts.tol) * psd_power(in.b, p, opts.tol));
        settle_scalar(e, lhs, rhs, lhs, rhs);
        return e;
    });
}

/// Open: λ(A²+|BA|ᵖ) ≻ λ(A²+|AB|ᵖ) for all p > 0. The trace equality
/// tr|BA|ᵖ = tr|AB|ᵖ that the relation presupposes is reported as
/// `trace_defect`.
inline check_result check_conjecture2(const matrix& a, const matrix& b, const check_params& params,
                                      const check_options& opts = {}) {
    using namespace detail;
    const double p = require_p(params, "conj2");
    if (!(p > 0.0)) throw domain_error("conj2: p must be > 0");
    check_params used;
    used.p = p;
    return evaluate(check_id::conj2, used, a, b, opts, [&](const auto& in) {
        evaluation e(opts.tol);
        const auto a2 = square(in.a);
        const auto ba_p = abs_power(in.b * in.a, p, opts.tol);
        const auto ab_p = abs_power(in.a * in.b, p, opts.tol);
        const auto tr_ba = ba_p.trace();
        const auto tr_ab = ab_p.trace();
        e.result.details["trace_defect"] = d(abs(tr_ba - tr_ab));
        e.result.details["trace_defect_scaled"] = d(scaled(abs(tr_ba - tr_ab), tr_ba));
        const auto x = spectrum(a2 + ba_p, opts.tol);
        const auto y = spectrum(a2 + ab_p, opts.tol);
        settle_majorization(e, x, y, majorizes(x, y, opts.tol), false);
        return e;
    });
}

/// Dispatches on the identifier; `params` must carry the parameter the
/// statement needs (p, t or k).
inline check_result run_check(check_id id, const matrix& a, const matrix& b, const check_params& params = {},
                              const check_options& opts = {}) {
    switch (id) {
    case check_id::eq1_polar: return check_polar_form(a, b, opts);
    case check_id::thm1: return check_thm1(a, b, opts);
    case check_id::thm2: return check_thm2(a, b, opts);
    case check_id::thm3: return check_thm3(a, b, params, opts);
    case check_id::eq5_logmaj: return check_geo_mean_logmaj(a, b, params, opts);
    case check_id::eq6_p2: return check_p2_consequence(a, b, params, opts);
    case check_id::lemma1: return check_lemma1(a, b, opts);
    case check_id::norm_chain: return check_norm_chain(a, b, opts);
    case check_id::thm4: return check_thm4(a, b, opts);
    case check_id::weyl: return check_weyl_logmaj(a, b, opts);
    case check_id::even_power: return check_even_power(a, b, params, opts);
    case check_id::conj1: return check_conjecture1(a, b, params, opts);
    case check_id::conj2: return check_conjecture2(a, b, params, opts);
    }
    throw domain_error("unhandled check id");
}

} // namespace detlab
