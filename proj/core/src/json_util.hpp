#pragma once

#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/normalize.hpp"

namespace gtrx::detail {

using ojson = nlohmann::ordered_json;

inline ojson answer_json(const NormalizedAnswer& a) {
    switch (a.kind) {
        case AnswerKind::Money: return ojson{{"kind", "money"}, {"value", a.money}};
        case AnswerKind::Percent: return ojson{{"kind", "percent"}, {"value", a.percent}};
        case AnswerKind::Duration: {
            ojson j{{"kind", "duration"},
                    {"magnitude", a.duration.magnitude},
                    {"unit", to_string(a.duration.unit)}};
            j["canonical_months"] =
                a.duration.canonical_months ? ojson(*a.duration.canonical_months) : ojson(nullptr);
            return j;
        }
        case AnswerKind::Unknown: break;
    }
    return ojson{{"kind", "unknown"}};
}

inline NormalizedAnswer answer_from(const ojson& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "unknown") return NormalizedAnswer::unknown();
    if (kind == "money") {
        const auto v = j.at("value").get<std::int64_t>();
        if (v < 0) throw InvalidInput("money must be non-negative");
        return NormalizedAnswer::of_money(v);
    }
    if (kind == "percent") {
        const int v = j.at("value").get<int>();
        if (v < 0 || v > 100) throw InvalidInput("percent must lie in [0,100]");
        return NormalizedAnswer::of_percent(v);
    }
    if (kind == "duration") {
        const int m = j.at("magnitude").get<int>();
        auto unit = duration_unit_from_string(j.at("unit").get<std::string>());
        if (!unit || m < 1) throw InvalidInput("invalid duration");
        return NormalizedAnswer::of_duration(m, *unit);
    }
    throw InvalidInput("unknown answer kind '" + kind + "'");
}

inline std::optional<std::string> optional_string(const ojson& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace gtrx::detail
