#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace geosugg {

/// Identifier of the normalization rules below. Recorded in artifacts so a
/// change of rules invalidates cached reduced datasets.
inline constexpr std::string_view normalizer_id = "rule-suffix-v1";

namespace detail {

inline bool is_ascii_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

inline bool has_vowel(std::string_view s) {
    for (char c : s)
        if (is_ascii_vowel(c)) return true;
    return false;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// One rewrite step; returns false when no rule applies.
inline bool reduce_suffix_once(std::string& token) {
    const std::string_view t = token;

    // cities -> city, libraries -> library
    if (t.size() > 4 && ends_with(t, "ies")) {
        token.replace(token.size() - 3, 3, "y");
        return true;
    }
    // churches -> church, boxes -> box, classes -> class
    for (std::string_view suffix : {"sses", "ches", "shes", "xes", "zzes"}) {
        if (t.size() > suffix.size() + 1 && ends_with(t, suffix)) {
            token.resize(token.size() - 2);
            return true;
        }
    }
    // parks -> park; keeps glass, bus, tennis, gas
    if (t.size() > 3 && t.back() == 's' && !ends_with(t, "ss") && !ends_with(t, "us") &&
        !ends_with(t, "is")) {
        token.pop_back();
        return true;
    }
    // parking -> park, swimming -> swim; keeps spring, king, hiking
    if (t.size() >= 7 && ends_with(t, "ing")) {
        std::string_view stem = t.substr(0, t.size() - 3);
        if (!has_vowel(stem)) return false;
        token.resize(token.size() - 3);
        const std::size_t n = token.size();
        if (n >= 2 && token[n - 1] == token[n - 2] && !is_ascii_vowel(token[n - 1]) &&
            token[n - 1] != 'l' && token[n - 1] != 's' && token[n - 1] != 'z') {
            token.pop_back();
        }
        return true;
    }
    return false;
}

}  // namespace detail

/// Applies the suffix table until no rule fires, so the result is a fixed
/// point and normalizing twice changes nothing.
inline std::string reduce_suffixes(std::string token) {
    while (detail::reduce_suffix_once(token)) {
    }
    return token;
}

/// Lowercases, drops apostrophes, treats every other ASCII punctuation or
/// whitespace byte as a separator, and reduces plural and "-ing" suffixes.
/// Non-ASCII bytes are kept verbatim as word characters.
inline std::vector<std::string> normalize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(reduce_suffixes(std::move(current)));
            current.clear();
        }
    };
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (c >= 0x80) {
            current.push_back(raw);
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            current.push_back(raw);
        } else if (c == '\'') {
            continue;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

}  // namespace geosugg
