#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

// shared numeric text helpers for the CSV / key=value writers and readers

namespace ptcirc::detail {

// 17 significant digits round-trips a double exactly
inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// strict full-string double parse; returns false on trailing garbage
inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* c = s.c_str();
    char* end = nullptr;
    out = std::strtod(c, &end);
    while (end && *end == ' ') ++end;
    return end && *end == '\0';
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace ptcirc::detail
