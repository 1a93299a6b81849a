#pragma once

// Internal text-format helpers shared by the persistence code.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "readlm/common.hpp"

namespace readlm::detail {

// Shortest exact round-trip representation.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(context + ": cannot parse number \"" + s + "\"");
    }
}

inline long long parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(context + ": cannot parse integer \"" + s + "\"");
    }
}

inline void write_comment(std::ostream& out, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << "\n";
}

// Key=value tokens scattered in leading comment lines, e.g.
// "# readlm 0.1.0 seed=7 ngram_min=3".
inline std::unordered_map<std::string, std::string>
comment_metadata(const std::vector<std::string>& comments) {
    std::unordered_map<std::string, std::string> meta;
    for (const auto& line : comments) {
        std::istringstream in(line);
        std::string tok;
        while (in >> tok) {
            const auto eq = tok.find('=');
            if (eq != std::string::npos && eq > 0)
                meta[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    return meta;
}

inline std::ifstream open_input(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + ": " + path.string());
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path, const char* what) {
    std::ofstream out(path);
    if (!out) throw IoError(std::string("cannot write ") + what + ": " + path.string());
    return out;
}

}  // namespace readlm::detail
