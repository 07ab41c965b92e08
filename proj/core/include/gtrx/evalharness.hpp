#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gtrx/doctree.hpp"
#include "gtrx/extraction.hpp"
#include "gtrx/fields.hpp"
#include "gtrx/normalize.hpp"

namespace gtrx::eval {

struct GoldAnnotation {
    std::string doc_id;
    MetadataField field = MetadataField::MinimumAward;
    std::optional<std::string> gold_raw;
    NormalizedAnswer gold;  // Unknown = annotated null
};

/// {doc_id, field, gold_raw, gold_normalized} per line; gold_normalized may be
/// omitted, in which case gold_raw is normalized. Throws InvalidInput on
/// malformed lines or duplicate (doc_id, field) pairs.
std::vector<GoldAnnotation> read_gold(std::string_view jsonl);
std::string gold_to_json(const GoldAnnotation& g);

struct Counts {
    std::size_t n = 0;
    std::size_t correct = 0;
    std::size_t unknown_predictions = 0;

    double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
    double unknown_rate() const {
        return n ? static_cast<double>(unknown_predictions) / static_cast<double>(n) : 0.0;
    }
};

struct FieldMetrics {
    MetadataField field = MetadataField::MinimumAward;
    Counts counts;
};

struct Metrics {
    std::array<FieldMetrics, 6> fields;
    Counts overall;

    const Counts& at(MetadataField f) const { return fields[field_index(f)].counts; }
};

/// A pair is correct when both sides are unknown or both are known and
/// answers_equal. Unknown rate counts unknown predictions regardless of gold.
/// Throws MissingPrediction listing every gold pair without a prediction.
Metrics score_predictions(const std::vector<GoldAnnotation>& gold,
                          const std::vector<extraction::Prediction>& predictions);

enum class ErrorCategory { FalsePositive, ValueMismatch, FalseNegative };
enum class HallucinationOrigin { Fabricated, MetadataTable, ElsewhereInBody };

std::string_view to_string(ErrorCategory c);
std::string_view to_string(HallucinationOrigin o);

struct FieldConfusion {
    MetadataField confused_with;
    bool operator==(const FieldConfusion&) const = default;
};

struct Hallucination {
    HallucinationOrigin origin;
    bool operator==(const Hallucination&) const = default;
};

using FalsePositiveSubtype = std::variant<FieldConfusion, Hallucination>;

struct ErrorCase {
    std::string doc_id;
    MetadataField field = MetadataField::MinimumAward;
    ErrorCategory category = ErrorCategory::ValueMismatch;
    std::optional<FalsePositiveSubtype> fp_subtype;  // present iff FalsePositive
    NormalizedAnswer gold;
    NormalizedAnswer predicted;
};

/// Classifies every incorrect pair. Output is sorted by (doc_id, field) so the
/// result does not depend on input order. Documents are needed for false
/// positives that are not field confusions; a missing one throws InvalidInput.
std::vector<ErrorCase> classify_errors(const std::vector<GoldAnnotation>& gold,
                                       const std::vector<extraction::Prediction>& predictions,
                                       const std::vector<doctree::OpportunityDoc>& docs);

/// True when `digits` occurs in `text` (after removing commas and pound signs)
/// with no digit immediately before or after it.
bool contains_value(std::string_view text, std::string_view digits);

struct Taxonomy {
    std::size_t total = 0;
    std::size_t false_positive = 0;
    std::size_t value_mismatch = 0;
    std::size_t false_negative = 0;
    std::size_t field_confusion = 0;
    std::size_t hallucination = 0;
    std::size_t fabricated = 0;
    std::size_t metadata_table = 0;
    std::size_t elsewhere_in_body = 0;
    /// (asked field, returned field's gold) -> count
    std::map<std::pair<MetadataField, MetadataField>, std::size_t> confusion_pairs;
};

Taxonomy summarize(const std::vector<ErrorCase>& errors);

// --- reporting -------------------------------------------------------------

struct ReportRow {
    std::string chunker;  // "None", "Simple", or "Hierarchical"
    std::optional<double> alpha;
    bool reranker = false;
    Metrics metrics;
};

struct Report {
    std::vector<ReportRow> rows;
    std::string taxonomy_label;  // configuration the error block describes
    Taxonomy taxonomy;
};

/// Percentage with one decimal, rounded half-up from the exact ratio.
std::string percent_1dp(std::size_t numerator, std::size_t denominator);

/// Text table with six field-accuracy columns, overall accuracy, and unknown
/// rate per row, followed by the error-taxonomy block.
std::string render_report(const Report& report);

std::string report_to_json(const Report& report);
/// Throws InvalidInput.
Report report_from_json(std::string_view json);

}  // namespace gtrx::eval
