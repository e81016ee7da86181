#include "pulse/survey/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <utility>

namespace pulse::survey {

namespace {

bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '\'' || c == '%';
}

constexpr std::array<std::pair<std::string_view, int>, 28> kNumberWords{{
    {"zero", 0},      {"one", 1},        {"two", 2},       {"three", 3},    {"four", 4},
    {"five", 5},      {"six", 6},        {"seven", 7},     {"eight", 8},    {"nine", 9},
    {"ten", 10},      {"eleven", 11},    {"twelve", 12},   {"thirteen", 13}, {"fourteen", 14},
    {"fifteen", 15},  {"sixteen", 16},   {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
    {"twenty", 20},   {"thirty", 30},    {"forty", 40},    {"fifty", 50},   {"sixty", 60},
    {"seventy", 70},  {"eighty", 80},    {"ninety", 90},
}};

std::optional<int> word_value(std::string_view w) {
    for (const auto& [name, v] : kNumberWords) {
        if (name == w) return v;
    }
    if (w == "once") return 1;
    if (w == "twice") return 2;
    if (w == "hundred") return 100;
    return std::nullopt;
}

std::optional<int> digit_value(std::string_view w) {
    while (!w.empty() && w.back() == '%') w.remove_suffix(1);
    if (w.empty() || !std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    int v = 0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{}) return std::nullopt;
    return v;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (is_word_char(c)) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    for (auto& t : out) {
        while (!t.empty() && t.back() == '\'') t.pop_back();
        while (!t.empty() && t.front() == '\'') t.erase(t.begin());
    }
    std::erase_if(out, [](const std::string& t) { return t.empty(); });
    return out;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::optional<int> parse_first_number(std::string_view text, bool allow_none) {
    const auto tokens = tokenize(text);
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (auto d = digit_value(tokens[i])) return d;
        if (auto w = word_value(tokens[i])) {
            int value = *w;
            // "twenty five", "one hundred"
            if (value >= 20 && value % 10 == 0 && value < 100 && i + 1 < tokens.size()) {
                if (auto unit = word_value(tokens[i + 1]); unit && *unit > 0 && *unit < 10) {
                    value += *unit;
                }
            } else if (value > 0 && value < 10 && i + 1 < tokens.size() &&
                       tokens[i + 1] == "hundred") {
                value *= 100;
            }
            return value;
        }
        if (allow_none && (tokens[i] == "no" || tokens[i] == "none" || tokens[i] == "nothing" ||
                           tokens[i] == "never")) {
            return 0;
        }
    }
    return std::nullopt;
}

std::optional<bool> parse_polar(std::string_view text) {
    static constexpr std::array<std::string_view, 8> yes{"yes", "yeah", "yep", "yup", "sure",
                                                         "definitely", "correct", "right"};
    static constexpr std::array<std::string_view, 8> no{"no", "nope", "nah", "not", "none",
                                                        "never", "nothing", "don't"};
    for (const auto& t : tokenize(text)) {
        if (std::find(no.begin(), no.end(), t) != no.end()) return false;
        if (std::find(yes.begin(), yes.end(), t) != yes.end()) return true;
    }
    return std::nullopt;
}

int edit_distance(std::string_view a, std::string_view b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace pulse::survey
