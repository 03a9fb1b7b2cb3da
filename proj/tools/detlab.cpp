// Command-line driver: randomized searches, single-instance replay and
// report summaries.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "detlab/detlab.hpp"

namespace {

using detlab::json;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw detlab::parse_error(std::string(what) + ": '" + s + "' is not a number");
}

/// "a:b:step" (inclusive range) or "x,y,z".
std::vector<double> parse_grid(const std::string& text, const char* what) {
    const auto parts = split(text, ':');
    if (parts.size() == 3 && text.find(',') == std::string::npos) {
        const double from = to_double(parts[0], what);
        const double to = to_double(parts[1], what);
        const double step = to_double(parts[2], what);
        if (!(step > 0.0) || to < from) throw detlab::parse_error(std::string(what) + ": invalid range '" + text + "'");
        return detlab::detail::step_grid(from, to, step);
    }
    std::vector<double> out;
    for (const auto& p : split(text, ',')) out.push_back(to_double(p, what));
    if (out.empty()) throw detlab::parse_error(std::string(what) + ": empty list");
    return out;
}

template <typename T>
std::vector<T> parse_counts(const std::string& text, const char* what) {
    std::vector<T> out;
    for (const auto& p : split(text, ',')) {
        const double v = to_double(p, what);
        if (v != static_cast<double>(static_cast<long long>(v))) {
            throw detlab::parse_error(std::string(what) + ": '" + p + "' is not an integer");
        }
        out.push_back(static_cast<T>(v));
    }
    if (out.empty()) throw detlab::parse_error(std::string(what) + ": empty list");
    return out;
}

struct search_args {
    std::string config;
    std::string checks, dims, p_grid, t_grid, k_list, samplers, tol, out;
    std::size_t trials = 0;
    std::string seed;
    std::optional<double> cond;
    std::optional<std::size_t> rank;
    std::size_t workers = 0;
    double eps = -1.0;
    bool no_inject = false;
    bool quiet = false;
};

detlab::search_config build_config(const search_args& a) {
    detlab::search_config cfg;
    if (!a.config.empty()) {
        cfg = detlab::load_config(a.config);
    } else {
        cfg.samplers.clear();
        for (const char* k : {"wishart", "spectrum_controlled", "rank_deficient"}) {
            detlab::sampler_spec s;
            s.kind = detlab::parse_sampler_kind(k);
            s.rank = 0;
            cfg.samplers.push_back(s);
        }
        cfg.checks.assign(detlab::all_check_ids.begin(), detlab::all_check_ids.end());
        cfg.dims = {2, 3, 4, 5, 6};
    }
    // Flags given explicitly override the config file.
    if (!a.checks.empty()) {
        cfg.checks.clear();
        for (const auto& c : split(a.checks, ',')) cfg.checks.push_back(detlab::parse_check_id(c));
    }
    if (!a.dims.empty()) cfg.dims = parse_counts<std::size_t>(a.dims, "--dims");
    if (a.trials) cfg.trials_per_cell = a.trials;
    if (!a.seed.empty()) cfg.seed = detlab::io::to_seed(json(a.seed), "--seed");
    if (!a.p_grid.empty()) cfg.p_grid = parse_grid(a.p_grid, "--p-grid");
    if (!a.t_grid.empty()) cfg.t_grid = parse_grid(a.t_grid, "--t-grid");
    if (!a.k_list.empty()) cfg.k_list = parse_counts<int>(a.k_list, "--k-list");
    if (!a.samplers.empty()) {
        cfg.samplers.clear();
        for (const auto& k : split(a.samplers, ',')) {
            detlab::sampler_spec s;
            s.kind = detlab::parse_sampler_kind(k);
            s.rank = 0;
            cfg.samplers.push_back(s);
        }
    }
    for (auto& s : cfg.samplers) {
        if (a.cond) s.cond = *a.cond;
        if (a.rank) s.rank = *a.rank;
    }
    if (a.workers) cfg.workers = a.workers;
    if (!a.tol.empty()) cfg.tol = detlab::parse_tolerance(a.tol);
    if (a.eps >= 0.0) cfg.eps = a.eps;
    if (!a.out.empty()) cfg.out_path = a.out;
    if (a.no_inject) cfg.inject_example = false;
    detlab::validate(cfg);
    return cfg;
}

int run_search_command(const search_args& a) {
    const auto cfg = build_config(a);
    const auto outcome = detlab::run_search(cfg, a.quiet ? nullptr : &std::cerr);
    std::cout << "wrote " << outcome.records << " records to " << cfg.out_path << "\n"
              << "summary: " << detlab::summary_path_for(cfg.out_path) << "\n";
    const auto& candidates = outcome.summary["counterexample_candidates"];
    if (!candidates.empty()) {
        std::cout << "COUNTEREXAMPLE CANDIDATES: " << candidates.size() << " (see summary)\n";
    }
    if (outcome.regressions) {
        std::cout << "REGRESSIONS: " << outcome.regressions << " proven-statement failures\n";
        return 1;
    }
    return 0;
}

int run_replay_command(const std::string& pair_path, const std::string& check, const std::vector<double>& p,
                       const std::vector<double>& t, const std::vector<int>& k, const std::string& tol) {
    const auto pair = detlab::load_pair(pair_path);
    const auto id = detlab::parse_check_id(check);
    detlab::check_params params;
    if (!p.empty()) params.p = p.front();
    if (!t.empty()) params.t = t.front();
    if (!k.empty()) params.k = k.front();
    detlab::check_options opts;
    if (!tol.empty()) opts.tol = detlab::parse_tolerance(tol);
    const auto result = detlab::run_check(id, pair.a, pair.b, params, opts);
    std::cout << to_json(result).dump(2) << "\n";
    return 0;
}

int run_reproduce_command(const std::string& report, std::size_t record_index) {
    const auto records = detlab::read_records(report);
    for (const auto& rec : records) {
        if (rec.value("record_index", std::size_t{0}) != record_index) continue;
        const auto result = detlab::reproduce(rec);
        json out = to_json(result);
        out["recorded_margin"] = rec["margin"];
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    throw detlab::parse_error(report + ": no record with record_index " + std::to_string(record_index));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Determinantal and majorization inequality laboratory for PSD matrix pairs"};
    app.set_version_flag("--version", std::string(detlab::version));
    app.require_subcommand(1);

    search_args sa;
    auto* search = app.add_subcommand("search", "Run a randomized search and write a JSONL report");
    search->add_option("--config", sa.config, "JSON config file");
    search->add_option("--checks", sa.checks, "Comma-separated check ids");
    search->add_option("--dims", sa.dims, "Comma-separated dimensions");
    search->add_option("--trials", sa.trials, "Trials per (sampler, dimension) cell");
    search->add_option("--seed", sa.seed, "Master seed (decimal or 0x hex)");
    search->add_option("--p-grid", sa.p_grid, "p values: from:to:step or a,b,c");
    search->add_option("--t-grid", sa.t_grid, "t values: from:to:step or a,b,c");
    search->add_option("--k-list", sa.k_list, "k values: a,b,c");
    search->add_option("--samplers", sa.samplers, "Comma-separated sampler kinds");
    search->add_option("--cond", sa.cond, "Condition number for spectrum_controlled");
    search->add_option("--rank", sa.rank, "Rank for rank_deficient (0 = n-1)");
    search->add_option("--workers", sa.workers, "Worker threads");
    search->add_option("--tol", sa.tol, "Tolerance 'rel' or 'rel,abs'");
    search->add_option("--eps", sa.eps, "Regularization shift for singular operands");
    search->add_option("--out", sa.out, "Record stream path (.jsonl)");
    search->add_flag("--no-inject", sa.no_inject, "Do not inject the bundled example pair");
    search->add_flag("--quiet", sa.quiet, "No progress output");

    std::string pair_path, check, tol;
    std::vector<double> p, t;
    std::vector<int> k;
    auto* replay = app.add_subcommand("replay", "Run one check on a stored pair and print the result as JSON");
    replay->add_option("--pair", pair_path, "Pair file {\"A\": Matrix, \"B\": Matrix}")->required();
    replay->add_option("--check", check, "Check id")->required();
    auto* p_opt = replay->add_option("--p", p, "Exponent p")->expected(1);
    auto* t_opt = replay->add_option("--t", t, "Mean weight t")->expected(1);
    auto* k_opt = replay->add_option("--k", k, "Even power index k")->expected(1);
    p_opt->excludes(t_opt)->excludes(k_opt);
    t_opt->excludes(k_opt);
    replay->add_option("--tol", tol, "Tolerance 'rel' or 'rel,abs'");

    std::string report;
    auto* summarize = app.add_subcommand("summarize", "Print a table for a JSONL report");
    summarize->add_option("report", report, "Record stream")->required();

    std::string repro_report;
    std::size_t record_index = 0;
    auto* reproduce = app.add_subcommand("reproduce", "Re-run one record of a report from its seeds");
    reproduce->add_option("report", repro_report, "Record stream")->required();
    reproduce->add_option("--record", record_index, "record_index to re-run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*search) return run_search_command(sa);
        if (*replay) return run_replay_command(pair_path, check, p, t, k, tol);
        if (*summarize) return detlab::summarize(report, std::cout);
        if (*reproduce) return run_reproduce_command(repro_report, record_index);
    } catch (const detlab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
