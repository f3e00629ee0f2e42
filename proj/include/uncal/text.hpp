#pragma once

#include <cctype>
#include <string>
#include <string_view>

namespace uncal {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Lowercase, strip surrounding whitespace/punctuation, collapse inner runs of
/// whitespace to single spaces. Shared by expression matching and the
/// simulated judge.
inline std::string normalize_text(std::string_view s) {
    s = trim(s);
    auto is_punct = [](unsigned char c) {
        return std::ispunct(c) != 0;
    };
    while (!s.empty() && is_punct(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_punct(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    s = trim(s);
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

inline std::string capitalize_first(std::string s) {
    for (char& c : s) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            break;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) break;
    }
    return s;
}

}  // namespace uncal
