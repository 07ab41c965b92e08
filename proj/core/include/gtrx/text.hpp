#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gtrx::text {

/// Collapses runs of ASCII whitespace (and U+00A0) to a single space and trims.
std::string normalize_space(std::string_view s);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Whitespace-delimited tokens.
std::vector<std::string> split_words(std::string_view s);

/// Lexical tokens: lowercase, split on anything that is not [a-z0-9].
std::vector<std::string> lexical_tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Decodes UTF-8 into code points. Invalid bytes map to U+FFFD.
std::u32string decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

}  // namespace gtrx::text

namespace gtrx {

/// Proleptic Gregorian calendar date.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    std::string iso() const;

    static bool valid(int y, int m, int d);
    /// Accepts "YYYY-MM-DD".
    static std::optional<Date> parse_iso(std::string_view s);
    /// Accepts "D Month YYYY" (full or three-letter English month names).
    static std::optional<Date> parse_long(std::string_view s);
    /// Tries ISO first, then the long form.
    static std::optional<Date> parse(std::string_view s);
};

}  // namespace gtrx
