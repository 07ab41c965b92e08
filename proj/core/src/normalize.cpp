#include "gtrx/normalize.hpp"

#include <array>
#include <cctype>

#include "gtrx/errors.hpp"
#include "gtrx/text.hpp"
#include "json_util.hpp"

namespace gtrx {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

struct Number {
    std::string int_digits;
    std::string frac_digits;
    std::size_t end = 0;  // index just past the number
};

/// First decimal number in `s` (digits with an optional fractional part).
std::optional<Number> first_number(std::string_view s, std::size_t from = 0) {
    std::size_t i = from;
    while (i < s.size() && !is_digit(s[i])) ++i;
    if (i == s.size()) return std::nullopt;
    Number n;
    while (i < s.size() && is_digit(s[i])) n.int_digits.push_back(s[i++]);
    if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
        ++i;
        while (i < s.size() && is_digit(s[i])) n.frac_digits.push_back(s[i++]);
    }
    n.end = i;
    return n;
}

std::string next_word(std::string_view s, std::size_t from) {
    std::size_t i = from;
    while (i < s.size() && (s[i] == ' ' || s[i] == '-')) ++i;
    std::string w;
    while (i < s.size() && is_alpha(s[i])) w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i++]))));
    return w;
}

__extension__ using u128 = unsigned __int128;

/// (int.frac) * scale rounded half-up; nullopt on overflow.
std::optional<std::int64_t> scaled_round(const Number& n, std::uint64_t scale) {
    std::string frac = n.frac_digits.substr(0, 9);
    std::string digits = n.int_digits;
    while (digits.size() > 1 && digits.front() == '0') digits.erase(0, 1);
    if (digits.size() > 15) return std::nullopt;
    u128 num = 0;
    for (char c : digits + frac) num = num * 10 + static_cast<unsigned>(c - '0');
    u128 den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    num *= scale;
    const u128 rounded = (2 * num + den) / (2 * den);
    if (rounded > static_cast<u128>(INT64_MAX)) return std::nullopt;
    return static_cast<std::int64_t>(rounded);
}

std::optional<std::uint64_t> scale_for(std::string_view word) {
    if (word == "k" || word == "thousand") return 1000ull;
    if (word == "m" || word == "mn" || word == "million") return 1000000ull;
    if (word == "bn" || word == "billion") return 1000000000ull;
    return std::nullopt;
}

std::string strip_money_noise(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == ',') continue;
        if (static_cast<unsigned char>(raw[i]) == 0xC2 && i + 1 < raw.size() &&
            static_cast<unsigned char>(raw[i + 1]) == 0xA3) {  // £
            ++i;
            continue;
        }
        out.push_back(raw[i]);
    }
    return out;
}

std::optional<NormalizedAnswer> parse_money(std::string_view raw) {
    const std::string s = text::to_lower_ascii(strip_money_noise(raw));
    auto n = first_number(s);
    if (!n) return std::nullopt;
    const std::string word = next_word(s, n->end);
    const std::uint64_t scale = scale_for(word).value_or(1);
    auto v = scaled_round(*n, scale);
    if (!v) return std::nullopt;
    return NormalizedAnswer::of_money(*v);
}

std::optional<NormalizedAnswer> parse_percent(std::string_view raw) {
    // thousands separators would otherwise cut "10,000" down to 10
    auto n = first_number(strip_money_noise(raw));
    if (!n) return std::nullopt;
    auto v = scaled_round(*n, 1);
    if (!v || *v > 100) return std::nullopt;
    return NormalizedAnswer::of_percent(static_cast<int>(*v));
}

constexpr std::array<std::string_view, 21> kNumberWords = {
    "zero",  "one",     "two",      "three",    "four",    "five",    "six",
    "seven", "eight",   "nine",     "ten",      "eleven",  "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};

std::optional<DurationUnit> unit_word(std::string_view w) {
    if (w == "day" || w == "days") return DurationUnit::Days;
    if (w == "week" || w == "weeks") return DurationUnit::Weeks;
    if (w == "month" || w == "months") return DurationUnit::Months;
    if (w == "year" || w == "years") return DurationUnit::Years;
    return std::nullopt;
}

std::optional<NormalizedAnswer> parse_duration(std::string_view raw) {
    const std::string s = text::to_lower_ascii(raw);
    // scan every candidate magnitude, numeric or spelled out, and take the
    // first one directly followed by a unit
    std::size_t i = 0;
    while (i < s.size()) {
        if (is_digit(s[i])) {
            auto n = first_number(s, i);
            const std::string word = next_word(s, n->end);
            if (auto unit = unit_word(word)) {
                if (!n->frac_digits.empty() || n->int_digits.size() > 6) return std::nullopt;
                const int magnitude = std::stoi(n->int_digits);
                if (magnitude < 1) return std::nullopt;
                return NormalizedAnswer::of_duration(magnitude, *unit);
            }
            i = n->end;
            continue;
        }
        if (is_alpha(s[i]) && (i == 0 || !is_alpha(s[i - 1]))) {
            std::size_t j = i;
            while (j < s.size() && is_alpha(s[j])) ++j;
            const std::string_view w(s.data() + i, j - i);
            for (std::size_t k = 1; k < kNumberWords.size(); ++k) {
                if (w == kNumberWords[k]) {
                    if (auto unit = unit_word(next_word(s, j)))
                        return NormalizedAnswer::of_duration(static_cast<int>(k), *unit);
                }
            }
            i = j;
            continue;
        }
        ++i;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(DurationUnit unit) {
    switch (unit) {
        case DurationUnit::Days: return "days";
        case DurationUnit::Weeks: return "weeks";
        case DurationUnit::Months: return "months";
        case DurationUnit::Years: return "years";
    }
    return "months";
}

std::optional<DurationUnit> duration_unit_from_string(std::string_view s) { return unit_word(s); }

NormalizedAnswer NormalizedAnswer::of_money(std::int64_t pounds) {
    NormalizedAnswer a;
    a.kind = AnswerKind::Money;
    a.money = pounds;
    return a;
}

NormalizedAnswer NormalizedAnswer::of_percent(int value) {
    NormalizedAnswer a;
    a.kind = AnswerKind::Percent;
    a.percent = value;
    return a;
}

NormalizedAnswer NormalizedAnswer::of_duration(int magnitude, DurationUnit unit) {
    NormalizedAnswer a;
    a.kind = AnswerKind::Duration;
    a.duration.magnitude = magnitude;
    a.duration.unit = unit;
    if (unit == DurationUnit::Months) a.duration.canonical_months = magnitude;
    if (unit == DurationUnit::Years) a.duration.canonical_months = 12 * magnitude;
    return a;
}

bool answers_equal(const NormalizedAnswer& a, const NormalizedAnswer& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case AnswerKind::Unknown: return true;
        case AnswerKind::Money: return a.money == b.money;
        case AnswerKind::Percent: return a.percent == b.percent;
        case AnswerKind::Duration:
            if (a.duration.canonical_months && b.duration.canonical_months)
                return *a.duration.canonical_months == *b.duration.canonical_months;
            return a.duration.magnitude == b.duration.magnitude && a.duration.unit == b.duration.unit;
    }
    return false;
}

NormalizedAnswer normalize_answer(MetadataField field, const std::optional<std::string>& raw,
                                  NormalizeWarnings* warnings) {
    if (!raw) return NormalizedAnswer::unknown();
    const std::string trimmed = text::trim(*raw);
    if (trimmed.empty() || text::iequals(trimmed, "null")) return NormalizedAnswer::unknown();

    std::optional<NormalizedAnswer> parsed;
    switch (field_answer_kind(field)) {
        case AnswerKind::Money: parsed = parse_money(trimmed); break;
        case AnswerKind::Percent: parsed = parse_percent(trimmed); break;
        case AnswerKind::Duration: parsed = parse_duration(trimmed); break;
        case AnswerKind::Unknown: break;
    }
    if (!parsed) {
        if (warnings)
            warnings->add(std::string(field_key(field)) + ": could not normalize '" + trimmed + "'");
        return NormalizedAnswer::unknown();
    }
    return *parsed;
}

std::optional<std::string> render_answer(const NormalizedAnswer& a) {
    switch (a.kind) {
        case AnswerKind::Unknown: return std::nullopt;
        case AnswerKind::Money: return std::to_string(a.money);
        case AnswerKind::Percent: return std::to_string(a.percent) + "%";
        case AnswerKind::Duration: {
            std::string unit(to_string(a.duration.unit));
            if (a.duration.magnitude == 1) unit.pop_back();
            return std::to_string(a.duration.magnitude) + " " + unit;
        }
    }
    return std::nullopt;
}

std::string value_digits(const NormalizedAnswer& a) {
    switch (a.kind) {
        case AnswerKind::Unknown: return {};
        case AnswerKind::Money: return std::to_string(a.money);
        case AnswerKind::Percent: return std::to_string(a.percent);
        case AnswerKind::Duration: return std::to_string(a.duration.magnitude);
    }
    return {};
}

std::string describe(const NormalizedAnswer& a) { return render_answer(a).value_or("null"); }

std::string answer_to_json(const NormalizedAnswer& a) { return detail::answer_json(a).dump(); }

NormalizedAnswer answer_from_json(std::string_view json) {
    try {
        return detail::answer_from(nlohmann::ordered_json::parse(json));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("normalized answer: ") + e.what());
    }
}

}  // namespace gtrx
