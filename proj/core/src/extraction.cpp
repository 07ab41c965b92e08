#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/extraction.hpp"
#include "json_util.hpp"

namespace gtrx::extraction {

using detail::ojson;

std::string ExtractionSettings::mode_label() const {
    return mode == ExtractionMode::FullDocument ? "full_document" : retrieval.label();
}

ExtractionResult extract_fields(const doctree::OpportunityDoc& doc, const ExtractionSettings& settings,
                                const CompletionClient& client) {
    ExtractionResult result;
    result.opportunity_id = doc.opportunity_id;
    result.mode_label = settings.mode_label();

    std::optional<retrieval::ChunkIndex> index;
    std::string full_text;
    if (settings.mode == ExtractionMode::Retrieval) {
        settings.retrieval.validate();
        index.emplace(retrieval::make_chunks(doc, settings.retrieval));
    } else {
        full_text = doctree::serialize_markdown(doc.root);
    }

    for (const MetadataField field : kAllFields) {
        FieldExtraction& out = result.fields[field_index(field)];
        out.field = field;
        const std::string_view question = field_question(field);

        std::string context;
        if (index) {
            const auto hits = retrieval::retrieve(*index, question, settings.retrieval, settings.ports);
            context = retrieval::concatenate_context(hits);
            for (const auto& h : hits) out.context_chunk_ids.push_back(h.chunk.chunk_id);
            if (settings.trace_sink) settings.trace_sink(retrieval::trace_record(doc.opportunity_id, question, hits));
        } else {
            context = full_text;
        }

        const CompletionRequest request{doc.opportunity_id, field, build_prompt(context, question)};
        const std::string response = complete_with_retry(client, request, settings.retry);

        std::optional<std::string> raw;
        try {
            raw = parse_answer(response, field_key(field));
        } catch (const MalformedResponse&) {
            try {
                // the instruction template names the key literally
                raw = parse_answer(response, "<key>");
            } catch (const MalformedResponse&) {
                result.warnings.add(std::string(field_key(field)) + ": malformed response");
                raw.reset();
            }
        }
        out.normalized = normalize_answer(field, raw, &result.warnings);
        out.raw = out.normalized.is_unknown() ? std::nullopt : raw;
    }
    return result;
}

std::vector<Prediction> to_predictions(const ExtractionResult& result) {
    std::vector<Prediction> out;
    const bool full = result.mode_label == "full_document";
    for (const auto& f : result.fields) {
        out.push_back(Prediction{result.opportunity_id, f.field, f.raw, f.normalized, f.context_chunk_ids,
                                 full ? "full_document" : "retrieval", result.mode_label});
    }
    return out;
}

std::string prediction_to_json(const Prediction& p) {
    ojson j;
    j["doc_id"] = p.doc_id;
    j["field"] = field_key(p.field);
    j["raw"] = p.raw ? ojson(*p.raw) : ojson(nullptr);
    j["normalized"] = detail::answer_json(p.normalized);
    j["context_chunk_ids"] = p.context_chunk_ids;
    j["mode"] = p.mode;
    j["config"] = p.config;
    return j.dump();
}

Prediction prediction_from_json(std::string_view line) {
    try {
        const auto j = ojson::parse(line);
        Prediction p;
        p.doc_id = j.at("doc_id").get<std::string>();
        const auto key = j.at("field").get<std::string>();
        const auto field = field_from_key(key);
        if (!field) throw InvalidInput("unknown field '" + key + "'");
        p.field = *field;
        p.raw = detail::optional_string(j, "raw");
        if (j.contains("normalized"))
            p.normalized = detail::answer_from(j.at("normalized"));
        else
            p.normalized = normalize_answer(p.field, p.raw);
        if (j.contains("context_chunk_ids"))
            p.context_chunk_ids = j.at("context_chunk_ids").get<std::vector<std::string>>();
        p.mode = j.value("mode", std::string{});
        p.config = j.value("config", std::string{});
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("prediction record: ") + e.what());
    }
}

std::vector<Prediction> read_predictions(std::string_view jsonl) {
    std::vector<Prediction> out;
    std::size_t pos = 0, line_no = 0;
    while (pos <= jsonl.size()) {
        std::size_t eol = jsonl.find('\n', pos);
        if (eol == std::string_view::npos) eol = jsonl.size();
        const std::string line = text::trim(jsonl.substr(pos, eol - pos));
        ++line_no;
        pos = eol + 1;
        if (line.empty()) continue;
        try {
            out.push_back(prediction_from_json(line));
        } catch (const InvalidInput& e) {
            throw InvalidInput("predictions line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace gtrx::extraction
