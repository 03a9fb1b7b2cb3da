#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "detlab/checks.hpp"
#include "detlab/error.hpp"
#include "detlab/matrix.hpp"
#include "detlab/sampler.hpp"
#include "detlab/tolerance.hpp"

namespace detlab {

using json = nlohmann::json;

/// A and B as stored in a pair file {"A": Matrix, "B": Matrix}.
struct matrix_pair {
    matrix a;
    matrix b;
};

namespace io {

// ---------------------------------------------------------------------------
// Numbers. JSON has no infinities, so non-finite values travel as the
// strings "inf", "-inf" and "nan".

inline json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double to_number(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw parse_error(where + ": expected a number, got " + std::string(j.type_name()));
}

/// Seeds are written as hexadecimal strings so that readers limited to
/// 53-bit integers keep them intact; plain integers are accepted on input.
inline std::string seed_to_string(std::uint64_t seed) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llX", static_cast<unsigned long long>(seed));
    return buf;
}

inline std::uint64_t to_seed(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        try {
            std::size_t used = 0;
            const auto v = std::stoull(s, &used, 0);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    throw parse_error(where + ": expected an unsigned 64-bit seed");
}

// ---------------------------------------------------------------------------
// Document access with path-qualified diagnostics.

inline const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw parse_error(where + ": expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw parse_error(where + ": missing field '" + key + "'");
    return *it;
}

inline std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

/// Parses JSON text; syntax errors carry line and column.
inline json parse_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw parse_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": invalid JSON (" + e.what() + ")");
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw io_error("failed writing '" + path + "'");
}

} // namespace io

// ---------------------------------------------------------------------------
// Matrices

inline json to_json(const matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return {{"n", m.size()}, {"rows", std::move(rows)}};
}

/// Reads {"n": int, "rows": [[...], ...]}; `where` prefixes diagnostics.
inline matrix matrix_from_json(const json& j, const std::string& where = "matrix") {
    const json& n_field = io::field(j, "n", where);
    if (!n_field.is_number_integer() || n_field.get<std::int64_t>() < 1) {
        throw parse_error(io::join(where, "n") + ": expected a positive integer");
    }
    const auto n = static_cast<std::size_t>(n_field.get<std::int64_t>());
    const json& rows = io::field(j, "rows", where);
    const std::string rows_where = io::join(where, "rows");
    if (!rows.is_array()) throw parse_error(rows_where + ": expected an array of rows");
    if (rows.size() != n) {
        throw parse_error(rows_where + ": expected " + std::to_string(n) + " rows, got " +
                          std::to_string(rows.size()));
    }
    matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row_where = rows_where + "[" + std::to_string(i) + "]";
        const json& row = rows[i];
        if (!row.is_array() || row.size() != n) {
            throw parse_error(row_where + ": expected an array of " + std::to_string(n) + " numbers");
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::string cell = row_where + "[" + std::to_string(k) + "]";
            if (!row[k].is_number()) throw parse_error(cell + ": expected a number");
            const double v = row[k].get<double>();
            if (!std::isfinite(v)) throw parse_error(cell + ": entry is not finite");
            m(i, k) = v;
        }
    }
    return m;
}

inline json to_json(const matrix_pair& p) { return {{"A", to_json(p.a)}, {"B", to_json(p.b)}}; }

inline matrix_pair pair_from_json(const json& j, const std::string& where = "") {
    matrix_pair p;
    p.a = matrix_from_json(io::field(j, "A", where.empty() ? "pair" : where), io::join(where, "A"));
    p.b = matrix_from_json(io::field(j, "B", where.empty() ? "pair" : where), io::join(where, "B"));
    if (p.a.size() != p.b.size()) {
        throw parse_error((where.empty() ? std::string("pair") : where) + ": A is " + std::to_string(p.a.size()) +
                          "x" + std::to_string(p.a.size()) + " but B is " + std::to_string(p.b.size()) + "x" +
                          std::to_string(p.b.size()));
    }
    return p;
}

inline matrix_pair load_pair(const std::string& path) {
    const json j = io::parse_text(io::read_file(path), path);
    try {
        return pair_from_json(j);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Small value types

inline json to_json(const tolerance& t) { return {{"rel", t.rel}, {"abs", t.abs}}; }

inline tolerance tolerance_from_json(const json& j, const std::string& where = "tol") {
    tolerance t;
    t.rel = io::to_number(io::field(j, "rel", where), io::join(where, "rel"));
    t.abs = io::to_number(io::field(j, "abs", where), io::join(where, "abs"));
    try {
        validate(t);
    } catch (const domain_error& e) {
        throw parse_error(where + ": " + e.what());
    }
    return t;
}

inline json to_json(const sampler_spec& s) {
    return {{"kind", std::string(to_string(s.kind))},
            {"n", s.n},
            {"cond", s.cond},
            {"rank", s.rank},
            {"seed", io::seed_to_string(s.seed)}};
}

inline sampler_spec sampler_from_json(const json& j, const std::string& where = "sampler") {
    sampler_spec s;
    const json& kind = io::field(j, "kind", where);
    if (!kind.is_string()) throw parse_error(io::join(where, "kind") + ": expected a string");
    try {
        s.kind = parse_sampler_kind(kind.get<std::string>());
    } catch (const parse_error& e) {
        throw parse_error(io::join(where, "kind") + ": " + e.what());
    }
    const auto count = [&](const char* key) -> std::size_t {
        const json& v = io::field(j, key, where);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw parse_error(io::join(where, key) + ": expected a non-negative integer");
        }
        return static_cast<std::size_t>(v.get<std::int64_t>());
    };
    s.n = count("n");
    s.cond = io::to_number(io::field(j, "cond", where), io::join(where, "cond"));
    s.rank = count("rank");
    s.seed = io::to_seed(io::field(j, "seed", where), io::join(where, "seed"));
    return s;
}

inline json to_json(const check_params& p) {
    json j = json::object();
    if (p.p) j["p"] = *p.p;
    if (p.t) j["t"] = *p.t;
    if (p.k) j["k"] = *p.k;
    j["out_of_range"] = p.out_of_range;
    return j;
}

inline check_params params_from_json(const json& j, const std::string& where = "params") {
    if (!j.is_object()) throw parse_error(where + ": expected an object");
    check_params p;
    if (j.contains("p")) p.p = io::to_number(j["p"], io::join(where, "p"));
    if (j.contains("t")) p.t = io::to_number(j["t"], io::join(where, "t"));
    if (j.contains("k")) {
        if (!j["k"].is_number_integer()) throw parse_error(io::join(where, "k") + ": expected an integer");
        p.k = j["k"].get<int>();
    }
    if (j.contains("out_of_range")) p.out_of_range = j["out_of_range"].get<bool>();
    return p;
}

inline json side_to_json(const side_value& v) {
    if (const auto* s = std::get_if<double>(&v)) return io::number(*s);
    json arr = json::array();
    for (double x : std::get<std::vector<double>>(v)) arr.push_back(io::number(x));
    return arr;
}

inline side_value side_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) return io::to_number(j, where);
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(io::to_number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline json to_json(const check_result& r) {
    json details = json::object();
    for (const auto& [k, v] : r.details) details[k] = io::number(v);
    return {{"check_id", std::string(to_string(r.id))},
            {"params", to_json(r.params)},
            {"lhs", side_to_json(r.lhs)},
            {"rhs", side_to_json(r.rhs)},
            {"margin", io::number(r.margin)},
            {"raw_margin", io::number(r.raw_margin)},
            {"verdict", std::string(to_string(r.outcome))},
            {"tol_used", to_json(r.tol_used)},
            {"details", std::move(details)}};
}

inline check_result check_result_from_json(const json& j, const std::string& where = "result") {
    check_result r;
    r.id = parse_check_id(io::field(j, "check_id", where).get<std::string>());
    r.params = params_from_json(io::field(j, "params", where), io::join(where, "params"));
    r.lhs = side_from_json(io::field(j, "lhs", where), io::join(where, "lhs"));
    r.rhs = side_from_json(io::field(j, "rhs", where), io::join(where, "rhs"));
    r.margin = io::to_number(io::field(j, "margin", where), io::join(where, "margin"));
    r.raw_margin = io::to_number(io::field(j, "raw_margin", where), io::join(where, "raw_margin"));
    r.outcome = parse_verdict(io::field(j, "verdict", where).get<std::string>());
    r.tol_used = tolerance_from_json(io::field(j, "tol_used", where), io::join(where, "tol_used"));
    for (const auto& [k, v] : io::field(j, "details", where).items()) {
        r.details[k] = io::to_number(v, io::join(where, "details." + k));
    }
    return r;
}

} // namespace detlab
