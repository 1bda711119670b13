#pragma once

// Flat key/value system configuration:
//
//   n = 3
//   hamiltonians = [x1, x2]
//   rho_lambda = 1            # optional, default 1
//   rho_box = 1               # optional, default 1
//   section = x1^2            # optional
//   domain = [-1:1, -1:1, -1:1]   # optional box bounds per coordinate
//   param.a0 = 1.5            # parameter bindings
//
// '#' starts a comment. List values are bracketed and comma-separated;
// commas nested in parentheses (e.g. pow(x1, 2)) do not split.

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "field.hpp"

namespace nj {

struct SystemConfig {
    std::size_t n = 0;
    std::vector<std::string> hamiltonian_text;
    std::string rho_lambda_text = "1";
    std::string rho_box_text = "1";
    ParamEnv params;
    std::optional<std::string> section_text;
    std::vector<std::pair<double, double>> domain; // per-coordinate bounds

    std::vector<ScalarField> hamiltonians;
    ScalarField rho_lambda;
    ScalarField rho_box;
    std::optional<ScalarField> section; // function of n-1 base coordinates
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// split a bracketed list at depth-0 commas
inline std::vector<std::string> split_list(const std::string& raw, std::string& err) {
    std::string s = trim(raw);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
        err = "expected a bracketed list [ ... ]";
        return {};
    }
    s = s.substr(1, s.size() - 2);
    std::vector<std::string> items;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !items.empty()) items.push_back(trim(cur));
    return items;
}

} // namespace detail

inline SystemConfig load_config_text(const std::string& text) {
    SystemConfig cfg;
    std::vector<std::string> errors;
    std::map<std::string, std::pair<std::string, int>> kv; // key -> (value, line)

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        // '=' inside a list value never appears before the key's '='
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (kv.count(key))
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = {value, lineno};
    }

    auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        auto v = it->second;
        kv.erase(it);
        return v;
    };

    // n
    if (auto v = take("n")) {
        try {
            long parsed = std::stol(v->first);
            if (parsed < 3) throw std::out_of_range("");
            cfg.n = static_cast<std::size_t>(parsed);
        } catch (...) {
            errors.push_back("line " + std::to_string(v->second) + ": n must be an integer >= 3");
        }
    } else {
        errors.push_back("missing required key 'n'");
    }

    // params (before expressions, so they can be referenced)
    for (auto it = kv.begin(); it != kv.end();) {
        if (it->first.rfind("param.", 0) == 0) {
            std::string name = it->first.substr(6);
            try {
                cfg.params[name] = std::stod(it->second.first);
            } catch (...) {
                errors.push_back("line " + std::to_string(it->second.second) +
                                 ": parameter '" + name + "' is not a number");
            }
            it = kv.erase(it);
        } else {
            ++it;
        }
    }

    std::set<std::string> param_names;
    for (const auto& [k, v] : cfg.params) param_names.insert(k);

    auto parse_field = [&](const std::string& text_expr, std::size_t nvars, int lineno2,
                           const std::string& what) -> std::optional<ScalarField> {
        try {
            ExprPtr e = parse(text_expr, nvars, param_names);
            return ScalarField(e, nvars, cfg.params);
        } catch (const error& ex) {
            errors.push_back("line " + std::to_string(lineno2) + ": " + what + ": " + ex.what());
            return std::nullopt;
        }
    };

    if (auto v = take("hamiltonians")) {
        std::string err;
        auto items = detail::split_list(v->first, err);
        if (!err.empty()) {
            errors.push_back("line " + std::to_string(v->second) + ": hamiltonians: " + err);
        } else {
            cfg.hamiltonian_text = items;
            if (cfg.n >= 3 && items.size() != cfg.n - 1)
                errors.push_back("line " + std::to_string(v->second) + ": need n-1 = " +
                                 std::to_string(cfg.n - 1) + " hamiltonians, got " +
                                 std::to_string(items.size()));
            if (cfg.n >= 3)
                for (const auto& h : items)
                    if (auto f = parse_field(h, cfg.n, v->second, "hamiltonian '" + h + "'"))
                        cfg.hamiltonians.push_back(*f);
        }
    } else {
        errors.push_back("missing required key 'hamiltonians'");
    }

    if (auto v = take("rho_lambda")) cfg.rho_lambda_text = v->first;
    if (auto v = take("rho_box")) cfg.rho_box_text = v->first;
    if (cfg.n >= 3) {
        if (auto f = parse_field(cfg.rho_lambda_text, cfg.n, 0, "rho_lambda"))
            cfg.rho_lambda = *f;
        if (auto f = parse_field(cfg.rho_box_text, cfg.n, 0, "rho_box")) cfg.rho_box = *f;
    }

    if (auto v = take("section")) {
        cfg.section_text = v->first;
        if (cfg.n >= 3)
            if (auto f = parse_field(v->first, cfg.n - 1, v->second, "section"))
                cfg.section = *f;
    }

    if (auto v = take("domain")) {
        std::string err;
        auto items = detail::split_list(v->first, err);
        if (!err.empty()) {
            errors.push_back("line " + std::to_string(v->second) + ": domain: " + err);
        } else {
            for (const auto& item : items) {
                auto colon = item.find(':');
                bool ok = colon != std::string::npos;
                double lo = 0, hi = 0;
                if (ok) {
                    try {
                        lo = std::stod(item.substr(0, colon));
                        hi = std::stod(item.substr(colon + 1));
                    } catch (...) {
                        ok = false;
                    }
                }
                if (!ok || !(hi > lo)) {
                    errors.push_back("line " + std::to_string(v->second) +
                                     ": domain entry '" + item + "' must be lo:hi with hi > lo");
                } else {
                    cfg.domain.push_back({lo, hi});
                }
            }
            if (cfg.n >= 3 && !cfg.domain.empty() && cfg.domain.size() != cfg.n)
                errors.push_back("line " + std::to_string(v->second) +
                                 ": domain needs one lo:hi entry per coordinate");
        }
    }

    for (const auto& [key, v] : kv)
        errors.push_back("line " + std::to_string(v.second) + ": unknown key '" + key + "'");

    if (!errors.empty()) {
        std::string report = "configuration errors:";
        for (const auto& e : errors) report += "\n  " + e;
        throw invalid_input(report);
    }
    return cfg;
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

} // namespace nj
