#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtrx/fields.hpp"

namespace gtrx {

enum class DurationUnit { Days, Weeks, Months, Years };

std::string_view to_string(DurationUnit unit);
std::optional<DurationUnit> duration_unit_from_string(std::string_view s);

struct Duration {
    int magnitude = 0;
    DurationUnit unit = DurationUnit::Months;
    std::optional<int> canonical_months;  // set iff unit is months or years

    bool operator==(const Duration&) const = default;
};

/// Canonical value of an extracted answer.
struct NormalizedAnswer {
    AnswerKind kind = AnswerKind::Unknown;
    std::int64_t money = 0;  // integer pounds
    int percent = 0;
    Duration duration;

    static NormalizedAnswer unknown() { return {}; }
    static NormalizedAnswer of_money(std::int64_t pounds);
    static NormalizedAnswer of_percent(int value);
    static NormalizedAnswer of_duration(int magnitude, DurationUnit unit);

    bool is_unknown() const { return kind == AnswerKind::Unknown; }
    bool operator==(const NormalizedAnswer&) const = default;
};

/// Evaluation equality: kinds must agree; money and percent compare exactly;
/// durations compare canonical months when both have them, otherwise
/// (magnitude, unit). Two unknowns are equal.
bool answers_equal(const NormalizedAnswer& a, const NormalizedAnswer& b);

struct NormalizeWarnings {
    int count = 0;
    std::vector<std::string> messages;

    void add(std::string message) {
        ++count;
        messages.push_back(std::move(message));
    }
};

/// Parses a raw answer into canonical form. Null or unparseable input yields
/// Unknown; unparseable input also records a warning.
NormalizedAnswer normalize_answer(MetadataField field, const std::optional<std::string>& raw,
                                  NormalizeWarnings* warnings = nullptr);

/// Text form that normalize_answer maps back to the same value; nullopt for
/// Unknown.
std::optional<std::string> render_answer(const NormalizedAnswer& answer);

/// Bare digits of the value ("2000000", "80", "36"); empty for Unknown.
std::string value_digits(const NormalizedAnswer& answer);

/// Compact human-readable form used in reports, "null" for Unknown.
std::string describe(const NormalizedAnswer& answer);

std::string answer_to_json(const NormalizedAnswer& answer);
/// Throws InvalidInput on malformed input.
NormalizedAnswer answer_from_json(std::string_view json);

}  // namespace gtrx
