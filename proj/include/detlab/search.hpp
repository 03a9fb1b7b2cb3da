#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "detlab/checks.hpp"
#include "detlab/error.hpp"
#include "detlab/io.hpp"
#include "detlab/matrix.hpp"
#include "detlab/sampler.hpp"
#include "detlab/tolerance.hpp"

namespace detlab {

inline constexpr std::string_view version = "0.1.0";

/// The 2×2 pair whose p = 3 determinants, 100 against 71, show that the
/// determinant inequality stops holding beyond p = 2.
inline matrix_pair paper_example_pair() {
    return {matrix{{1.0, 1.0}, {1.0, 2.0}}, matrix{{2.0, -2.0}, {-2.0, 3.0}}};
}

inline constexpr std::string_view example_source = "corpus:paper_example";

// ---------------------------------------------------------------------------
// Configuration

struct search_config {
    std::vector<check_id> checks;
    std::vector<std::size_t> dims;
    std::size_t trials_per_cell = 100;
    /// Sampler templates; `n` and `seed` are filled in per trial. A rank of 0
    /// on a rank_deficient template means n − 1 (at least 1).
    std::vector<sampler_spec> samplers{sampler_spec{}};
    std::uint64_t seed = 0;
    /// Empty grids select the per-check defaults below.
    std::vector<double> p_grid;
    std::vector<double> t_grid;
    std::vector<int> k_list;
    tolerance tol = default_tolerance();
    double eps = 1e-10;
    std::string out_path = "report.jsonl";
    std::size_t workers = 1;
    /// Adds the bundled example pair as trial 0 of every p-parameterised check.
    bool inject_example = true;
};

namespace detail {

inline std::vector<double> step_grid(double from, double to, double step) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = from + i * step;
        if (v > to + step * 1e-9) break;
        out.push_back(v);
    }
    return out;
}

} // namespace detail

/// Parameter values searched for `id` when the config leaves the grid empty.
inline std::vector<double> default_grid(check_id id) {
    switch (id) {
    case check_id::thm3: return detail::step_grid(0.0, 2.0, 0.25);
    case check_id::conj1: return detail::step_grid(0.25, 2.0, 0.25);
    case check_id::conj2: return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
    case check_id::eq5_logmaj:
    case check_id::eq6_p2: return {0.0, 0.25, 0.5, 0.75, 1.0};
    case check_id::even_power: return {1.0, 2.0};
    default: return {0.0};
    }
}

/// Parameter values of `id` under `cfg` (a single dummy value for checks
/// without a parameter).
inline std::vector<double> grid_for(const search_config& cfg, check_id id) {
    switch (parameter_of(id)) {
    case parameter_kind::p:
        return cfg.p_grid.empty() ? default_grid(id) : cfg.p_grid;
    case parameter_kind::t:
        return cfg.t_grid.empty() ? default_grid(id) : cfg.t_grid;
    case parameter_kind::k:
        if (cfg.k_list.empty()) return default_grid(id);
        return {cfg.k_list.begin(), cfg.k_list.end()};
    case parameter_kind::none: break;
    }
    return {0.0};
}

/// Params as the checkers report them, including the out-of-range flag.
inline check_params make_params(check_id id, double value) {
    check_params p;
    switch (parameter_of(id)) {
    case parameter_kind::p:
        p.p = value;
        p.out_of_range = (id == check_id::thm3 || id == check_id::conj1) && value > 2.0;
        break;
    case parameter_kind::t: p.t = value; break;
    case parameter_kind::k: p.k = static_cast<int>(value); break;
    case parameter_kind::none: break;
    }
    return p;
}

/// Rank written into a trial's sampler spec: n for full-rank kinds, and
/// n − 1 (at least 1) when a rank_deficient template leaves it at 0.
inline std::size_t effective_rank(const sampler_spec& tmpl, std::size_t n) {
    if (tmpl.kind != sampler_kind::rank_deficient) return n;
    if (tmpl.rank == 0) return n > 1 ? n - 1 : 1;
    return tmpl.rank;
}

inline void validate(const search_config& cfg) {
    if (cfg.checks.empty()) throw domain_error("config: checks must not be empty");
    if (cfg.dims.empty()) throw domain_error("config: dims must not be empty");
    if (cfg.trials_per_cell < 1) throw domain_error("config: trials_per_cell must be >= 1");
    if (cfg.samplers.empty()) throw domain_error("config: at least one sampler is required");
    if (cfg.workers < 1) throw domain_error("config: workers must be >= 1");
    if (!(cfg.eps >= 0.0) || !std::isfinite(cfg.eps)) throw domain_error("config: eps must be a finite number >= 0");
    validate(cfg.tol);
    for (std::size_t n : cfg.dims) {
        if (n < 1) throw domain_error("config: every dimension must be >= 1");
        for (const auto& tmpl : cfg.samplers) {
            sampler_spec s = tmpl;
            s.n = n;
            s.rank = effective_rank(tmpl, n);
            validate(s);
        }
    }
    for (check_id id : cfg.checks) {
        for (double v : grid_for(cfg, id)) {
            switch (parameter_of(id)) {
            case parameter_kind::p:
                if (!std::isfinite(v) || v < 0.0) throw domain_error("config: p values must be finite and >= 0");
                if (id == check_id::conj2 && !(v > 0.0)) throw domain_error("config: conj2 requires p > 0");
                break;
            case parameter_kind::t:
                if (!(v >= 0.0 && v <= 1.0)) throw domain_error("config: t values must lie in [0, 1]");
                break;
            case parameter_kind::k:
                if (v < 1.0) throw domain_error("config: k values must be >= 1");
                break;
            case parameter_kind::none: break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Config <-> JSON

inline json to_json(const search_config& cfg) {
    json checks = json::array();
    for (check_id id : cfg.checks) checks.push_back(std::string(to_string(id)));
    json samplers = json::array();
    for (const auto& s : cfg.samplers) {
        samplers.push_back({{"kind", std::string(to_string(s.kind))}, {"cond", s.cond}, {"rank", s.rank}});
    }
    return {{"checks", checks},
            {"dims", cfg.dims},
            {"trials_per_cell", cfg.trials_per_cell},
            {"samplers", samplers},
            {"seed", io::seed_to_string(cfg.seed)},
            {"p_grid", cfg.p_grid},
            {"t_grid", cfg.t_grid},
            {"k_list", cfg.k_list},
            {"tol", to_json(cfg.tol)},
            {"eps", cfg.eps},
            {"out_path", cfg.out_path},
            {"workers", cfg.workers},
            {"inject_example", cfg.inject_example}};
}

namespace detail {

inline std::size_t to_count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
        throw parse_error(where + ": expected a non-negative integer");
    }
    return static_cast<std::size_t>(j.get<std::int64_t>());
}

template <typename F>
auto to_list(const json& j, const std::string& where, F item) {
    if (!j.is_array()) throw parse_error(where + ": expected an array");
    std::vector<decltype(item(j, where))> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline sampler_spec sampler_template_from_json(const json& j, const std::string& where) {
    static const std::set<std::string> known{"kind", "cond", "rank", "seed", "n"};
    if (!j.is_object()) throw parse_error(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw parse_error(where + ": unknown field '" + key + "'");
    }
    sampler_spec s;
    s.rank = 0;
    const json& kind = io::field(j, "kind", where);
    if (!kind.is_string()) throw parse_error(where + ".kind: expected a string");
    try {
        s.kind = parse_sampler_kind(kind.get<std::string>());
    } catch (const parse_error& e) {
        throw parse_error(where + ".kind: " + e.what());
    }
    if (j.contains("cond")) s.cond = io::to_number(j["cond"], where + ".cond");
    if (j.contains("rank")) s.rank = to_count(j["rank"], where + ".rank");
    if (j.contains("seed")) s.seed = io::to_seed(j["seed"], where + ".seed");
    return s;
}

} // namespace detail

/// Reads a config document. Keys mirror `to_json(search_config)`; a single
/// `sampler` object (whose seed is the master seed) is accepted in place of
/// `samplers`. Unknown keys are rejected so typos cannot pass silently.
inline search_config config_from_json(const json& j) {
    static const std::set<std::string> known{"checks",  "dims",   "trials_per_cell", "sampler", "samplers",
                                             "seed",    "p_grid", "t_grid",          "k_list",  "tol",
                                             "eps",     "out_path", "workers",       "inject_example"};
    if (!j.is_object()) throw parse_error("config: expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw parse_error("config: unknown field '" + key + "'");
    }
    search_config cfg;
    cfg.checks = detail::to_list(io::field(j, "checks", "config"), "checks", [](const json& v, const std::string& w) {
        if (!v.is_string()) throw parse_error(w + ": expected a check id string");
        try {
            return parse_check_id(v.get<std::string>());
        } catch (const parse_error& e) {
            throw parse_error(w + ": " + e.what());
        }
    });
    cfg.dims = detail::to_list(io::field(j, "dims", "config"), "dims", detail::to_count);
    if (j.contains("trials_per_cell")) cfg.trials_per_cell = detail::to_count(j["trials_per_cell"], "trials_per_cell");
    if (j.contains("sampler") && j.contains("samplers")) {
        throw parse_error("config: give either 'sampler' or 'samplers', not both");
    }
    if (j.contains("sampler")) {
        const auto s = detail::sampler_template_from_json(j["sampler"], "sampler");
        cfg.samplers = {s};
        cfg.seed = s.seed;
    }
    if (j.contains("samplers")) {
        cfg.samplers = detail::to_list(j["samplers"], "samplers", detail::sampler_template_from_json);
    }
    if (j.contains("seed")) cfg.seed = io::to_seed(j["seed"], "seed");
    if (j.contains("p_grid")) cfg.p_grid = detail::to_list(j["p_grid"], "p_grid", io::to_number);
    if (j.contains("t_grid")) cfg.t_grid = detail::to_list(j["t_grid"], "t_grid", io::to_number);
    if (j.contains("k_list")) {
        cfg.k_list = detail::to_list(j["k_list"], "k_list", [](const json& v, const std::string& w) {
            if (!v.is_number_integer()) throw parse_error(w + ": expected an integer");
            return v.get<int>();
        });
    }
    if (j.contains("tol")) cfg.tol = tolerance_from_json(j["tol"], "tol");
    if (j.contains("eps")) cfg.eps = io::to_number(j["eps"], "eps");
    if (j.contains("out_path")) {
        if (!j["out_path"].is_string()) throw parse_error("out_path: expected a string");
        cfg.out_path = j["out_path"].get<std::string>();
    }
    if (j.contains("workers")) cfg.workers = detail::to_count(j["workers"], "workers");
    if (j.contains("inject_example")) {
        if (!j["inject_example"].is_boolean()) throw parse_error("inject_example: expected true or false");
        cfg.inject_example = j["inject_example"].get<bool>();
    }
    try {
        validate(cfg);
    } catch (const domain_error& e) {
        throw parse_error(e.what());
    }
    return cfg;
}

inline search_config load_config(const std::string& path) {
    const json j = io::parse_text(io::read_file(path), path);
    try {
        return config_from_json(j);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Trials

/// One unit of work: a check, a parameter value and either a sampled pair
/// or the bundled example pair.
struct trial_task {
    check_id id = check_id::thm1;
    double param = 0.0;
    std::uint64_t trial_index = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::optional<sampler_spec> sampler_a;
    std::optional<sampler_spec> sampler_b;
    bool example = false;
};

/// Seed of the (sampler template, dimension) cell under the master seed.
inline std::uint64_t cell_seed(std::uint64_t master, std::size_t sampler_index, std::size_t n) {
    return derive_trial_seed(master, (static_cast<std::uint64_t>(sampler_index) << 32) | n);
}

/// All trials of a search in record order: check → parameter → [example]
/// → sampler → n → trial 1..N. Seeds depend only on (master, sampler, n,
/// trial), so the same pairs are revisited for every check and parameter.
inline std::vector<trial_task> plan_trials(const search_config& cfg) {
    std::vector<trial_task> tasks;
    for (check_id id : cfg.checks) {
        for (double param : grid_for(cfg, id)) {
            if (cfg.inject_example && parameter_of(id) == parameter_kind::p) {
                trial_task t;
                t.id = id;
                t.param = param;
                t.n = 2;
                t.example = true;
                tasks.push_back(t);
            }
            for (std::size_t si = 0; si < cfg.samplers.size(); ++si) {
                for (std::size_t n : cfg.dims) {
                    const std::uint64_t cell = cell_seed(cfg.seed, si, n);
                    for (std::uint64_t i = 1; i <= cfg.trials_per_cell; ++i) {
                        trial_task t;
                        t.id = id;
                        t.param = param;
                        t.trial_index = i;
                        t.seed = derive_trial_seed(cell, i);
                        t.n = n;
                        sampler_spec s = cfg.samplers[si];
                        s.n = n;
                        s.rank = effective_rank(cfg.samplers[si], n);
                        s.seed = derive_trial_seed(t.seed, 0);
                        t.sampler_a = s;
                        s.seed = derive_trial_seed(t.seed, 1);
                        t.sampler_b = s;
                        tasks.push_back(t);
                    }
                }
            }
        }
    }
    return tasks;
}

inline matrix_pair materialize(const trial_task& t) {
    if (t.example) return paper_example_pair();
    return {sample_psd(*t.sampler_a), sample_psd(*t.sampler_b)};
}

/// Runs one trial and returns its record. Structural errors raised by the
/// check become `warn` records carrying the message.
inline json run_trial(const trial_task& t, std::size_t record_index, const check_options& opts) {
    const auto start = std::chrono::steady_clock::now();
    json rec;
    rec["record_index"] = record_index;
    rec["trial_index"] = t.trial_index;
    rec["seed"] = io::seed_to_string(t.seed);
    rec["n"] = t.n;
    rec["check_id"] = std::string(to_string(t.id));
    rec["tol"] = to_json(opts.tol);
    rec["eps"] = opts.eps;
    if (t.example) {
        rec["source"] = std::string(example_source);
        rec["sampler_a"] = nullptr;
        rec["sampler_b"] = nullptr;
        rec["pair"] = to_json(paper_example_pair());
    } else {
        rec["source"] = "sampler";
        rec["sampler_a"] = to_json(*t.sampler_a);
        rec["sampler_b"] = to_json(*t.sampler_b);
    }
    try {
        const auto pair = materialize(t);
        const check_result r = run_check(t.id, pair.a, pair.b, make_params(t.id, t.param), opts);
        rec["params"] = to_json(r.params);
        rec["margin"] = io::number(r.margin);
        rec["raw_margin"] = io::number(r.raw_margin);
        rec["verdict"] = std::string(to_string(r.outcome));
        rec["lhs"] = side_to_json(r.lhs);
        rec["rhs"] = side_to_json(r.rhs);
        json details = json::object();
        for (const auto& [k, v] : r.details) details[k] = io::number(v);
        rec["details"] = std::move(details);
        rec["error"] = nullptr;
    } catch (const error& e) {
        rec["params"] = to_json(make_params(t.id, t.param));
        rec["margin"] = "nan";
        rec["raw_margin"] = "nan";
        rec["verdict"] = std::string(to_string(verdict::warn));
        rec["lhs"] = nullptr;
        rec["rhs"] = nullptr;
        rec["details"] = json::object();
        rec["error"] = e.what();
    }
    rec["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

/// Re-runs the check a record describes, from its sampler specs or stored pair.
inline check_result reproduce(const json& record) {
    const check_id id = parse_check_id(io::field(record, "check_id", "record").get<std::string>());
    matrix_pair pair;
    if (record.contains("pair") && !record["pair"].is_null()) {
        pair = pair_from_json(record["pair"], "pair");
    } else {
        pair.a = sample_psd(sampler_from_json(io::field(record, "sampler_a", "record"), "sampler_a"));
        pair.b = sample_psd(sampler_from_json(io::field(record, "sampler_b", "record"), "sampler_b"));
    }
    check_options opts;
    opts.tol = tolerance_from_json(io::field(record, "tol", "record"), "tol");
    opts.eps = io::to_number(io::field(record, "eps", "record"), "eps");
    return run_check(id, pair.a, pair.b, params_from_json(io::field(record, "params", "record")), opts);
}

// ---------------------------------------------------------------------------
// Summary

namespace detail {

/// Decade bins of a signed log scale: "0", "+1e-09" for margins in
/// [1e-9, 1e-8), "-1e-09" for (−1e-8, −1e-9], with |m| < 1e-15 counted as 0
/// and the outer bins open-ended at 1e3.
inline std::string histogram_bin(double m) {
    if (std::isnan(m)) return "nan";
    const double a = std::abs(m);
    if (a < 1e-15) return "0";
    int e = static_cast<int>(std::floor(std::log10(a)));
    e = std::clamp(e, -15, 3);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c1e%+03d", m < 0 ? '-' : '+', e);
    return buf;
}

inline bool is_regression(const json& rec) {
    if (rec.value("verdict", "") != "fail") return false;
    const check_id id = parse_check_id(rec.at("check_id").get<std::string>());
    const bool out_of_range = rec.at("params").value("out_of_range", false);
    return is_proven(id) && !out_of_range;
}

inline double record_margin(const json& rec) {
    const auto it = rec.find("margin");
    if (it == rec.end() || it->is_null()) return std::numeric_limits<double>::quiet_NaN();
    return io::to_number(*it, "margin");
}

inline std::string param_key(const json& params) {
    for (const char* k : {"p", "t", "k"}) {
        if (params.contains(k)) {
            std::ostringstream s;
            s << k << "=" << params[k].get<double>();
            return s.str();
        }
    }
    return "-";
}

inline json reproduction_data(const json& rec) {
    json c;
    for (const char* k : {"record_index", "trial_index", "seed", "n", "source", "sampler_a", "sampler_b", "check_id",
                          "params", "tol", "eps", "margin", "raw_margin", "lhs", "rhs", "details"}) {
        if (rec.contains(k)) c[k] = rec[k];
    }
    if (rec.contains("pair") && !rec["pair"].is_null()) {
        c["pair"] = rec["pair"];
    } else {
        try {
            c["pair"] = to_json(matrix_pair{sample_psd(sampler_from_json(rec.at("sampler_a"), "sampler_a")),
                                            sample_psd(sampler_from_json(rec.at("sampler_b"), "sampler_b"))});
        } catch (const error&) {
        }
    }
    return c;
}

} // namespace detail

/// Aggregates records into the summary document.
class summary_builder {
public:
    void add(const json& rec) {
        const std::string id = rec.at("check_id").get<std::string>();
        const std::string verdict = rec.at("verdict").get<std::string>();
        const double margin = detail::record_margin(rec);
        auto& c = checks_[id];
        ++c.count;
        ++c.verdicts[verdict];
        if (rec.contains("error") && !rec["error"].is_null()) ++c.errors;
        ++c.histogram[detail::histogram_bin(margin)];
        auto& bp = c.by_param[detail::param_key(rec.at("params"))];
        ++bp.count;
        ++bp.verdicts[verdict];
        if (std::isfinite(margin)) {
            if (!c.min_margin || margin < *c.min_margin) {
                c.min_margin = margin;
                c.min_record = brief(rec);
            }
            if (!bp.min_margin || margin < *bp.min_margin) bp.min_margin = margin;
        }
        if (verdict == "fail") {
            const check_id cid = parse_check_id(id);
            if (is_conjecture(cid)) {
                candidates_.push_back(detail::reproduction_data(rec));
            } else if (detail::is_regression(rec)) {
                regressions_.push_back(detail::reproduction_data(rec));
            } else {
                out_of_range_.push_back(brief(rec));
            }
        }
        if (rec.contains("details")) {
            const json& det = rec["details"];
            const bool trusted = det.value("precision_resolved", 0.0) == 1.0 && det.value("accuracy_warning", 1.0) == 0.0;
            for (const auto& [k, v] : det.items()) {
                constexpr std::string_view suffix = "_implication_ok";
                if (k.size() <= suffix.size() || k.compare(k.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
                if (!v.is_number()) continue;
                auto& imp = implications_[k.substr(0, k.size() - suffix.size())];
                ++imp.checked;
                if (v.get<double>() != 1.0) {
                    ++imp.violations;
                    if (trusted) {
                        ++imp.resolved_violations;
                        if (imp.examples.size() < 10) imp.examples.push_back(brief(rec));
                    }
                }
            }
        }
    }

    [[nodiscard]] std::size_t regression_count() const noexcept { return regressions_.size(); }

    [[nodiscard]] json build(const json& config_echo) const {
        json per_check = json::object();
        for (const auto& [id, c] : checks_) {
            json by_param = json::object();
            for (const auto& [k, bp] : c.by_param) {
                by_param[k] = {{"count", bp.count},
                               {"pass", at(bp.verdicts, "pass")},
                               {"fail", at(bp.verdicts, "fail")},
                               {"warn", at(bp.verdicts, "warn")},
                               {"min_margin", bp.min_margin ? io::number(*bp.min_margin) : json(nullptr)}};
            }
            per_check[id] = {{"count", c.count},
                             {"pass", at(c.verdicts, "pass")},
                             {"fail", at(c.verdicts, "fail")},
                             {"warn", at(c.verdicts, "warn")},
                             {"errors", c.errors},
                             {"min_margin", c.min_margin ? io::number(*c.min_margin) : json(nullptr)},
                             {"min_margin_record", c.min_record},
                             {"histogram", c.histogram},
                             {"by_param", by_param}};
        }
        json implications = json::object();
        for (const auto& [k, imp] : implications_) {
            implications[k] = {{"checked", imp.checked},
                               {"violations", imp.violations},
                               {"resolved_violations", imp.resolved_violations},
                               {"examples", imp.examples}};
        }
        return {{"tool", "detlab"},
                {"version", std::string(version)},
                {"config", config_echo},
                {"checks", per_check},
                {"counterexample_candidates", candidates_},
                {"regressions", regressions_},
                {"out_of_range_failures", out_of_range_},
                {"implications", implications}};
    }

private:
    struct param_stats {
        std::size_t count = 0;
        std::map<std::string, std::size_t> verdicts;
        std::optional<double> min_margin;
    };
    struct check_stats {
        std::size_t count = 0;
        std::size_t errors = 0;
        std::map<std::string, std::size_t> verdicts;
        std::optional<double> min_margin;
        json min_record = nullptr;
        std::map<std::string, std::size_t> histogram;
        std::map<std::string, param_stats> by_param;
    };
    struct implication_stats {
        std::size_t checked = 0;
        std::size_t violations = 0;
        std::size_t resolved_violations = 0;
        json examples = json::array();
    };

    static std::size_t at(const std::map<std::string, std::size_t>& m, const char* k) {
        const auto it = m.find(k);
        return it == m.end() ? 0 : it->second;
    }

    static json brief(const json& rec) {
        json b;
        for (const char* k : {"record_index", "trial_index", "seed", "n", "source", "check_id", "params", "margin", "verdict"}) {
            if (rec.contains(k)) b[k] = rec[k];
        }
        if (rec.contains("sampler_a") && rec["sampler_a"].is_object()) b["sampler"] = rec["sampler_a"]["kind"];
        return b;
    }

    std::map<std::string, check_stats> checks_;
    std::vector<json> candidates_;
    std::vector<json> regressions_;
    std::vector<json> out_of_range_;
    std::map<std::string, implication_stats> implications_;
};

/// `<stem>.summary.json` next to a `<stem>.jsonl` record stream.
inline std::string summary_path_for(const std::string& out_path) {
    const std::string ext = ".jsonl";
    if (out_path.size() > ext.size() && out_path.compare(out_path.size() - ext.size(), ext.size(), ext) == 0) {
        return out_path.substr(0, out_path.size() - ext.size()) + ".summary.json";
    }
    return out_path + ".summary.json";
}

struct search_outcome {
    json summary;
    std::size_t records = 0;
    std::size_t regressions = 0;
};

/// Runs every planned trial, streaming records to `cfg.out_path` in plan
/// order, then writes the summary. Workers share nothing but the task list;
/// records are buffered per batch and written in order by one writer, so the
/// stream is independent of the worker count.
inline search_outcome run_search(const search_config& cfg, std::ostream* progress = nullptr) {
    validate(cfg);
    std::ofstream out(cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + cfg.out_path + "' for writing");

    const auto tasks = plan_trials(cfg);
    check_options opts;
    opts.tol = cfg.tol;
    opts.eps = cfg.eps;

    summary_builder summary;
    constexpr std::size_t batch = 2048;
    std::vector<std::string> lines;
    std::vector<json> records;
    for (std::size_t begin = 0; begin < tasks.size(); begin += batch) {
        const std::size_t end = std::min(tasks.size(), begin + batch);
        records.assign(end - begin, json());
        std::atomic<std::size_t> next{begin};
        const auto work = [&] {
            for (std::size_t i = next++; i < end; i = next++) records[i - begin] = run_trial(tasks[i], i, opts);
        };
        const std::size_t threads = std::min(cfg.workers, end - begin);
        if (threads <= 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
        }
        for (const auto& rec : records) {
            out << rec.dump() << '\n';
            summary.add(rec);
        }
        out.flush();
        if (!out) throw io_error("failed writing '" + cfg.out_path + "'");
        if (progress) *progress << "\r" << end << "/" << tasks.size() << " trials" << std::flush;
    }
    if (progress) *progress << "\n";

    search_outcome result;
    result.records = tasks.size();
    result.regressions = summary.regression_count();
    result.summary = summary.build(to_json(cfg));
    io::write_file(summary_path_for(cfg.out_path), result.summary.dump(2) + "\n");
    return result;
}

// ---------------------------------------------------------------------------
// Reading reports

/// Parses a record stream. A final line that is cut off (no newline, not
/// valid JSON) is what an interrupted run leaves behind and is skipped;
/// any other malformed line is a parse error.
inline std::vector<json> read_records(const std::string& path, std::size_t* skipped_tail = nullptr) {
    const std::string text = io::read_file(path);
    std::vector<json> records;
    std::size_t line_no = 0, pos = 0;
    if (skipped_tail) *skipped_tail = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const bool last = nl == std::string::npos;
        const std::string line = text.substr(pos, last ? std::string::npos : nl - pos);
        pos = last ? text.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            if (last) {
                if (skipped_tail) *skipped_tail = 1;
                break;
            }
            throw parse_error(path + ":" + std::to_string(line_no) + ":" + std::to_string(e.byte) +
                              ": invalid record (" + e.what() + ")");
        }
        const std::string where = path + ":" + std::to_string(line_no);
        if (!rec.is_object()) throw parse_error(where + ": record must be an object");
        for (const char* k : {"check_id", "verdict", "params", "margin"}) {
            if (!rec.contains(k)) throw parse_error(where + ": missing field '" + std::string(k) + "'");
        }
        try {
            parse_check_id(rec["check_id"].get<std::string>());
            parse_verdict(rec["verdict"].get<std::string>());
        } catch (const parse_error& e) {
            throw parse_error(where + ": " + e.what());
        } catch (const json::exception& e) {
            throw parse_error(where + ": " + e.what());
        }
        records.push_back(std::move(rec));
    }
    return records;
}

/// Human-readable table of a record stream; returns the exit code (1 when
/// a proven statement failed inside its stated range, else 0).
inline int summarize(const std::string& path, std::ostream& os) {
    std::size_t skipped = 0;
    const auto records = read_records(path, &skipped);
    summary_builder builder;
    for (const auto& rec : records) builder.add(rec);
    const json s = builder.build(nullptr);

    os << "report: " << path << " (" << records.size() << " records";
    if (skipped) os << ", truncated last line skipped";
    os << ")\n";
    os << std::left << std::setw(12) << "check" << std::right << std::setw(9) << "trials" << std::setw(8) << "pass"
       << std::setw(8) << "fail" << std::setw(8) << "warn" << std::setw(15) << "min margin" << "  worst seed\n";
    for (const auto& [id, c] : s["checks"].items()) {
        std::ostringstream mm;
        if (c["min_margin"].is_null()) mm << "-";
        else if (c["min_margin"].is_string()) mm << c["min_margin"].get<std::string>();
        else mm << std::setprecision(4) << std::scientific << c["min_margin"].get<double>();
        std::string worst = "-";
        if (c["min_margin_record"].is_object()) {
            const json& r = c["min_margin_record"];
            worst = r.value("source", "") == example_source ? std::string(example_source) : r.value("seed", "-");
        }
        os << std::left << std::setw(12) << id << std::right << std::setw(9) << c["count"].get<std::size_t>()
           << std::setw(8) << c["pass"].get<std::size_t>() << std::setw(8) << c["fail"].get<std::size_t>()
           << std::setw(8) << c["warn"].get<std::size_t>() << std::setw(15) << mm.str() << "  " << worst << "\n";
    }
    const auto list = [&](const char* title, const json& items) {
        if (items.empty()) return;
        os << "\n" << title << " (" << items.size() << "):\n";
        for (const auto& r : items) {
            os << "  " << r.value("check_id", std::string()) << " " << r["params"].dump() << " n=" << r.value("n", 0)
               << " seed=" << r.value("seed", std::string("-")) << " margin=" << r["margin"].dump() << "\n";
        }
    };
    list("COUNTEREXAMPLE CANDIDATES (open conjectures)", s["counterexample_candidates"]);
    list("REGRESSIONS (proven statements failing)", s["regressions"]);
    if (!s["out_of_range_failures"].empty()) {
        os << "\nfailures outside the proven parameter range: " << s["out_of_range_failures"].size() << "\n";
    }
    for (const auto& [k, imp] : s["implications"].items()) {
        os << "implication " << k << ": " << imp["checked"].get<std::size_t>() << " checked, "
           << imp["resolved_violations"].get<std::size_t>() << " resolved violations\n";
    }
    return builder.regression_count() > 0 ? 1 : 0;
}

} // namespace detlab
