#pragma once

// Flat `key = value` configuration for FusionConfig. Blank lines and lines
// starting with '#' are ignored; unknown keys are rejected.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "degrade.hpp"
#include "fusion.hpp"

namespace lrrfuse {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::size_t parse_count(std::string_view text, const std::string& what) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw Error("invalid " + what + " '" + std::string(text) + "'");
    return v;
}

inline std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
    return std::string(buf, r.ptr);
}

}  // namespace detail

inline TieBreak parse_tie_break(std::string_view s) {
    if (s == "second") return TieBreak::second;
    if (s == "first") return TieBreak::first;
    throw Error("tie_break must be 'second' or 'first', got '" + std::string(s) + "'");
}

inline const char* tie_break_name(TieBreak t) { return t == TieBreak::first ? "first" : "second"; }

inline HighPatchOutput parse_high_output(std::string_view s) {
    if (s == "reconstruction") return HighPatchOutput::reconstruction;
    if (s == "raw") return HighPatchOutput::raw;
    throw Error("high_output must be 'reconstruction' or 'raw', got '" + std::string(s) + "'");
}

inline const char* high_output_name(HighPatchOutput h) {
    return h == HighPatchOutput::raw ? "raw" : "reconstruction";
}

/// Apply one key to `cfg`. Returns false for an unknown key.
inline bool apply_config_key(FusionConfig& cfg, std::string_view key, std::string_view value) {
    const std::string k(key);
    if (key == "lambda") cfg.lambda = parse_double(value, k);
    else if (key == "patch_size") cfg.patch_size = detail::parse_count(value, k);
    else if (key == "levels") cfg.levels = detail::parse_count(value, k);
    else if (key == "basis") cfg.basis = std::string(value);
    else if (key == "alm.tol") cfg.alm.tol = parse_double(value, k);
    else if (key == "alm.max_iter") cfg.alm.max_iter = detail::parse_count(value, k);
    else if (key == "alm.mu0") cfg.alm.mu0 = parse_double(value, k);
    else if (key == "alm.mu_max") cfg.alm.mu_max = parse_double(value, k);
    else if (key == "alm.rho") cfg.alm.rho = parse_double(value, k);
    else if (key == "tie_break") cfg.tie_break = parse_tie_break(value);
    else if (key == "high_output") cfg.high_output = parse_high_output(value);
    else if (key == "threads") cfg.threads = detail::parse_count(value, k);
    else return false;
    return true;
}

/// Read keys from `in` on top of `cfg`; returns the set of keys seen, in order.
inline std::vector<std::string> read_config(std::istream& in, FusionConfig& cfg,
                                            const std::string& source = "config") {
    std::vector<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string_view::npos) throw Error(where + ": expected key = value");
        const std::string_view key = detail::trim(text.substr(0, eq));
        const std::string_view value = detail::trim(text.substr(eq + 1));
        try {
            if (!apply_config_key(cfg, key, value))
                throw Error("unknown key '" + std::string(key) + "'");
        } catch (const Error& e) {
            throw Error(where + ": " + e.what());
        }
        seen.emplace_back(key);
    }
    cfg.validate();
    return seen;
}

inline std::vector<std::string> load_config(const std::string& path, FusionConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw Error(path + ": cannot open config file");
    return read_config(in, cfg, path);
}

inline void write_config(std::ostream& out, const FusionConfig& cfg) {
    out << "lambda = " << detail::shortest(cfg.lambda) << '\n'
        << "patch_size = " << cfg.patch_size << '\n'
        << "levels = " << cfg.levels << '\n'
        << "basis = " << cfg.basis << '\n'
        << "alm.tol = " << detail::shortest(cfg.alm.tol) << '\n'
        << "alm.max_iter = " << cfg.alm.max_iter << '\n'
        << "alm.mu0 = " << detail::shortest(cfg.alm.mu0) << '\n'
        << "alm.mu_max = " << detail::shortest(cfg.alm.mu_max) << '\n'
        << "alm.rho = " << detail::shortest(cfg.alm.rho) << '\n'
        << "tie_break = " << tie_break_name(cfg.tie_break) << '\n'
        << "high_output = " << high_output_name(cfg.high_output) << '\n'
        << "threads = " << cfg.threads << '\n';
}

}  // namespace lrrfuse
