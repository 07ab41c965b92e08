#include "gtrx/fields.hpp"

namespace gtrx {

namespace {

struct FieldInfo {
    MetadataField field;
    std::string_view key;
    std::string_view question;
    std::string_view column;
    AnswerKind kind;
};

constexpr FieldInfo kFields[] = {
    {MetadataField::MinimumAward, "minimum_award", "What is the minimum fund value (£)?", "Min",
     AnswerKind::Money},
    {MetadataField::MaximumAward, "maximum_award", "What is the maximum fund value (£)?", "Max",
     AnswerKind::Money},
    {MetadataField::TotalFunding, "total_funding",
     "What is the total fund value (£) split among successful applications?", "Total", AnswerKind::Money},
    {MetadataField::FundingPercentage, "funding_percentage",
     "What percentage (%) of the project's funding will UKRI fund?", "% Funded", AnswerKind::Percent},
    {MetadataField::MinimumFundingDuration, "minimum_funding_duration",
     "What is the minimum duration of the project/funding?", "Min Dur", AnswerKind::Duration},
    {MetadataField::MaximumFundingDuration, "maximum_funding_duration",
     "What is the maximum duration of the project/funding?", "Max Dur", AnswerKind::Duration},
};

const FieldInfo& info(MetadataField f) { return kFields[static_cast<std::size_t>(f)]; }

}  // namespace

std::string_view field_key(MetadataField field) { return info(field).key; }
std::string_view field_question(MetadataField field) { return info(field).question; }
std::string_view field_column(MetadataField field) { return info(field).column; }
AnswerKind field_answer_kind(MetadataField field) { return info(field).kind; }
std::size_t field_index(MetadataField field) { return static_cast<std::size_t>(field); }

std::optional<MetadataField> field_from_key(std::string_view key) {
    for (const auto& f : kFields)
        if (f.key == key) return f.field;
    return std::nullopt;
}

}  // namespace gtrx
