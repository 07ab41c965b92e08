#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gtrx/doctree.hpp"
#include "gtrx/fields.hpp"
#include "gtrx/normalize.hpp"
#include "gtrx/retrieval.hpp"

namespace gtrx::extraction {

struct Prompt {
    std::string system;
    std::string user;
};

/// The fixed system instruction for metadata extraction.
std::string_view system_prompt();

/// User text is "## CONTEXT\n{context}\n\n## QUESTION\n{question}".
Prompt build_prompt(std::string_view context, std::string_view question);

/// Value for `expected_key` from the first JSON object in `response` that has
/// it. JSON null and the string "null" map to nullopt; numbers are returned in
/// their JSON spelling. Throws MalformedResponse when no such object exists.
std::optional<std::string> parse_answer(std::string_view response, std::string_view expected_key);

// --- completion port ---------------------------------------------------------

struct CompletionRequest {
    std::string doc_id;
    MetadataField field;
    Prompt prompt;
};

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    /// Raw response text. Throws TransportError for retryable failures and
    /// CompletionFailure for permanent ones.
    virtual std::string complete(const CompletionRequest& request) const = 0;
};

/// Offline stub serving canned responses keyed by (doc_id, field). Read-only
/// after construction, so concurrent calls are safe.
class ReplayClient final : public CompletionClient {
public:
    ReplayClient() = default;

    /// Parses {doc_id, field, response_text} JSON lines. Throws InvalidInput.
    static ReplayClient from_jsonl(std::string_view content);

    void add(std::string doc_id, MetadataField field, std::string response_text);
    std::size_t size() const { return responses_.size(); }

    std::string complete(const CompletionRequest& request) const override;

private:
    std::map<std::pair<std::string, MetadataField>, std::string> responses_;
};

struct HttpCompletionConfig {
    std::string base_url = "http://localhost:8000";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "GTRX_API_KEY";
    int timeout_seconds = 120;
    double temperature = 0.0;
};

/// Chat-completions style JSON endpoint. The bearer token is read from the
/// environment variable named in the config at call time.
class HttpCompletionClient final : public CompletionClient {
public:
    explicit HttpCompletionClient(HttpCompletionConfig config);
    std::string complete(const CompletionRequest& request) const override;

private:
    HttpCompletionConfig config_;
};

struct RetryPolicy {
    int retries = 2;
    std::chrono::milliseconds base_delay{500};  // doubled after each failure
};

/// Retries TransportError up to `policy.retries` times with exponential
/// backoff, then throws CompletionFailure.
std::string complete_with_retry(const CompletionClient& client, const CompletionRequest& request,
                                const RetryPolicy& policy);

// --- orchestration -----------------------------------------------------------

enum class ExtractionMode { Retrieval, FullDocument };

struct ExtractionSettings {
    ExtractionMode mode = ExtractionMode::Retrieval;
    retrieval::RetrievalConfig retrieval;
    retrieval::Ports ports;
    RetryPolicy retry;
    /// Receives one retrieval trace record per field when set.
    std::function<void(const std::string&)> trace_sink;

    /// "full_document" or the retrieval config label.
    std::string mode_label() const;
};

struct FieldExtraction {
    MetadataField field = MetadataField::MinimumAward;
    std::optional<std::string> raw;
    NormalizedAnswer normalized;
    std::vector<std::string> context_chunk_ids;
};

struct ExtractionResult {
    std::string opportunity_id;
    std::string mode_label;
    std::array<FieldExtraction, 6> fields;
    NormalizeWarnings warnings;

    const FieldExtraction& at(MetadataField f) const { return fields[field_index(f)]; }
};

/// One retrieval and one completion call per field. Responses that cannot be
/// parsed degrade to an unknown answer and a warning.
ExtractionResult extract_fields(const doctree::OpportunityDoc& doc, const ExtractionSettings& settings,
                                const CompletionClient& client);

// --- prediction records --------------------------------------------------------

struct Prediction {
    std::string doc_id;
    MetadataField field = MetadataField::MinimumAward;
    std::optional<std::string> raw;
    NormalizedAnswer normalized;
    std::vector<std::string> context_chunk_ids;
    std::string mode;  // "full_document" or "retrieval"
    std::string config;  // mode label
};

std::vector<Prediction> to_predictions(const ExtractionResult& result);

/// Single-line JSON: {doc_id, field, raw, normalized, context_chunk_ids, mode, config}.
std::string prediction_to_json(const Prediction& p);
Prediction prediction_from_json(std::string_view line);
/// Skips blank lines. Throws InvalidInput naming the offending line.
std::vector<Prediction> read_predictions(std::string_view jsonl);

}  // namespace gtrx::extraction
