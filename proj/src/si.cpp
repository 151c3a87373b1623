#include "dendrite/si.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace dendrite::si {

namespace {

struct Suffix {
    const char* text;
    int exponent;
};

// Longest match first ("meg" before "m").
constexpr std::array<Suffix, 6> kSuffixes{{
    {"meg", 6}, {"k", 3}, {"m", -3}, {"u", -6}, {"n", -9}, {"p", -12},
}};

std::optional<double> parse_plain(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + text.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

} // namespace

std::optional<double> parse_value(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (auto v = parse_plain(std::string(text))) return v;
    for (const auto& s : kSuffixes) {
        const std::string_view sfx(s.text);
        if (text.size() <= sfx.size()) continue;
        if (!iequals(text.substr(text.size() - sfx.size()), sfx)) continue;
        const std::string mantissa(text.substr(0, text.size() - sfx.size()));
        // Fold the suffix into the decimal exponent so the scaling is exact.
        const auto epos = mantissa.find_first_of("eE");
        if (epos == std::string::npos)
            return parse_plain(mantissa + 'e' + std::to_string(s.exponent));
        const std::string digits = mantissa.substr(0, epos);
        const std::string exp_text = mantissa.substr(epos + 1);
        const char* exp_begin = exp_text.c_str();
        char* exp_end = nullptr;
        const long exp = std::strtol(exp_begin, &exp_end, 10);
        if (exp_text.empty() || exp_end != exp_begin + exp_text.size()) return std::nullopt;
        return parse_plain(digits + 'e' + std::to_string(exp + s.exponent));
    }
    return std::nullopt;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_value(double value) {
    const std::string plain = format_double(value);
    if (value == 0.0 || !std::isfinite(value)) return plain;

    // Shortest scientific form, decomposed into a digit string and a
    // decimal exponent; rebuilding the mantissa from the same digits keeps
    // the suffixed form bit-exact.
    std::array<char, 64> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific);
    const std::string sci(buf.data(), res.ptr);
    const auto epos = sci.find('e');
    std::string digits;
    for (char c : sci.substr(0, epos))
        if (c >= '0' && c <= '9') digits += c;
    const int exp10 = std::atoi(sci.c_str() + epos + 1);
    const bool negative = value < 0.0;

    if (exp10 >= 0 && exp10 <= 2) return plain; // already in [1, 1000)

    for (const auto& s : kSuffixes) {
        const int point = exp10 - s.exponent; // digits before the decimal point, minus one
        if (point < 0 || point > 2) continue;
        std::string mantissa = digits;
        while (mantissa.size() < static_cast<std::size_t>(point) + 1) mantissa += '0';
        if (mantissa.size() > static_cast<std::size_t>(point) + 1)
            mantissa.insert(static_cast<std::size_t>(point) + 1, ".");
        const std::string candidate = (negative ? "-" : "") + mantissa + s.text;
        if (auto back = parse_value(candidate); back && *back == value) return candidate;
    }
    return plain;
}

} // namespace dendrite::si
