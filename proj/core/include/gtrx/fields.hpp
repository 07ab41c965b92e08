#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace gtrx {

/// The six funding metadata targets.
enum class MetadataField {
    MinimumAward,
    MaximumAward,
    TotalFunding,
    FundingPercentage,
    MinimumFundingDuration,
    MaximumFundingDuration,
};

inline constexpr std::array<MetadataField, 6> kAllFields = {
    MetadataField::MinimumAward,           MetadataField::MaximumAward,
    MetadataField::TotalFunding,           MetadataField::FundingPercentage,
    MetadataField::MinimumFundingDuration, MetadataField::MaximumFundingDuration,
};

enum class AnswerKind { Money, Percent, Duration, Unknown };

/// JSON key, e.g. "minimum_award".
std::string_view field_key(MetadataField field);
std::optional<MetadataField> field_from_key(std::string_view key);

/// Question inserted into the extraction prompt for the field.
std::string_view field_question(MetadataField field);

/// Short column label used in reports ("Min", "Max", ...).
std::string_view field_column(MetadataField field);

/// Value kind a known answer for the field carries.
AnswerKind field_answer_kind(MetadataField field);

std::size_t field_index(MetadataField field);

}  // namespace gtrx
