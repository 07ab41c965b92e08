#include <doctest.h>

#include <mutex>

#include "fixtures.hpp"
#include "gtrx/errors.hpp"
#include "gtrx/extraction.hpp"

using namespace gtrx;
using namespace gtrx::extraction;

namespace {

/// Records every request and answers from a fixed script.
class ScriptedClient final : public CompletionClient {
public:
    explicit ScriptedClient(std::string response) : response_(std::move(response)) {}
    std::string complete(const CompletionRequest& r) const override {
        std::lock_guard lock(mu_);
        requests.push_back(r);
        return response_;
    }
    mutable std::vector<CompletionRequest> requests;

private:
    std::string response_;
    mutable std::mutex mu_;
};

/// Fails with TransportError a fixed number of times, then succeeds.
class FlakyClient final : public CompletionClient {
public:
    explicit FlakyClient(int failures) : failures_(failures) {}
    std::string complete(const CompletionRequest&) const override {
        ++calls;
        if (calls <= failures_) throw TransportError("connection reset");
        return "{\"minimum_award\": \"1000\"}";
    }
    mutable int calls = 0;

private:
    int failures_;
};

doctree::OpportunityDoc fixture_doc(const std::string& id) {
    return doctree::parse_opportunity_html(fixtures::read("corpus/docs/" + id + ".html"), id);
}

}  // namespace

TEST_CASE("prompt layout") {
    const auto p = build_prompt("CTX", "What is the minimum award?");
    CHECK(p.user == "## CONTEXT\nCTX\n\n## QUESTION\nWhat is the minimum award?");
    CHECK(p.system == system_prompt());
    CHECK(p.system.find("% symbol") != std::string::npos);
    CHECK(p.system.find("respond with null") != std::string::npos);
}

TEST_CASE("every field has a key, question and answer kind") {
    for (auto f : kAllFields) {
        CHECK(field_from_key(field_key(f)) == f);
        CHECK_FALSE(field_question(f).empty());
        CHECK(field_answer_kind(f) != AnswerKind::Unknown);
    }
    CHECK(field_key(MetadataField::MinimumAward) == "minimum_award");
    CHECK(field_from_key("bogus") == std::nullopt);
}

TEST_CASE("answer parsing") {
    CHECK(parse_answer("{\"minimum_award\": \"50000\"}", "minimum_award") == "50000");
    CHECK(parse_answer("{\"minimum_award\": 50000}", "minimum_award") == "50000");
    CHECK(parse_answer("{\"minimum_award\": null}", "minimum_award") == std::nullopt);
    CHECK(parse_answer("{\"minimum_award\": \"null\"}", "minimum_award") == std::nullopt);
    CHECK(parse_answer("Sure! {\"minimum_award\": \"£5,000\"} hope that helps", "minimum_award") == "£5,000");
    CHECK(parse_answer("{\"other\": 1} {\"minimum_award\": \"7\"}", "minimum_award") == "7");
    CHECK(parse_answer("{\"a\": \"{ not } a brace\", \"minimum_award\": \"9\"}", "minimum_award") == "9");
    CHECK_THROWS_AS(parse_answer("I don't know", "minimum_award"), MalformedResponse);
    CHECK_THROWS_AS(parse_answer("{\"maximum_award\": \"1\"}", "minimum_award"), MalformedResponse);
    CHECK_THROWS_AS(parse_answer("{\"minimum_award\": ", "minimum_award"), MalformedResponse);
}

TEST_CASE("normalization of money, percentages and durations") {
    using F = MetadataField;
    CHECK(normalize_answer(F::TotalFunding, "£1.5 million") == NormalizedAnswer::of_money(1500000));
    CHECK(normalize_answer(F::MinimumAward, "£50,000") == NormalizedAnswer::of_money(50000));
    CHECK(normalize_answer(F::MaximumAward, "50000") == NormalizedAnswer::of_money(50000));
    CHECK(normalize_answer(F::MaximumAward, "£2m") == NormalizedAnswer::of_money(2000000));
    CHECK(normalize_answer(F::FundingPercentage, "80%") == NormalizedAnswer::of_percent(80));
    CHECK(normalize_answer(F::FundingPercentage, "80") == NormalizedAnswer::of_percent(80));

    const auto years = normalize_answer(F::MaximumFundingDuration, "3 years");
    CHECK(years.kind == AnswerKind::Duration);
    CHECK(years.duration.canonical_months == 36);
    CHECK(answers_equal(years, normalize_answer(F::MaximumFundingDuration, "36 months")));
    const auto weeks = normalize_answer(F::MinimumFundingDuration, "6 weeks");
    CHECK(weeks.duration.unit == DurationUnit::Weeks);
    CHECK_FALSE(weeks.duration.canonical_months.has_value());
    CHECK_FALSE(answers_equal(weeks, normalize_answer(F::MinimumFundingDuration, "6 months")));

    NormalizeWarnings w;
    CHECK(normalize_answer(F::MinimumAward, "a modest sum", &w).is_unknown());
    CHECK(w.count == 1);
    CHECK(normalize_answer(F::MinimumAward, std::nullopt, &w).is_unknown());
    CHECK(w.count == 1);
}

TEST_CASE("rendered answers normalize back to themselves") {
    const std::vector<std::pair<MetadataField, std::string>> samples = {
        {MetadataField::MinimumAward, "£5,000"},          {MetadataField::TotalFunding, "£1.5 million"},
        {MetadataField::FundingPercentage, "100%"},       {MetadataField::MaximumFundingDuration, "4 years"},
        {MetadataField::MinimumFundingDuration, "6 weeks"}, {MetadataField::MinimumFundingDuration, "10 days"},
    };
    for (const auto& [field, raw] : samples) {
        const auto n = normalize_answer(field, raw);
        REQUIRE_FALSE(n.is_unknown());
        const auto rendered = render_answer(n);
        REQUIRE(rendered.has_value());
        CHECK(normalize_answer(field, rendered) == n);
        CHECK(answer_from_json(answer_to_json(n)) == n);
    }
    CHECK(render_answer(NormalizedAnswer::unknown()) == std::nullopt);
    CHECK(describe(NormalizedAnswer::unknown()) == "null");
    CHECK(value_digits(NormalizedAnswer::of_money(2000000)) == "2000000");
}

TEST_CASE("replay client serves canned responses by document and field") {
    const auto client = ReplayClient::from_jsonl(
        "{\"doc_id\":\"d1\",\"field\":\"minimum_award\",\"response_text\":\"{\\\"minimum_award\\\": \\\"1\\\"}\"}\n\n");
    CHECK(client.size() == 1);
    CHECK(client.complete({"d1", MetadataField::MinimumAward, {}}).find("\"1\"") != std::string::npos);
    CHECK_THROWS_AS(client.complete({"d1", MetadataField::MaximumAward, {}}), CompletionFailure);
    CHECK_THROWS_AS(ReplayClient::from_jsonl("{\"doc_id\":\"d\",\"field\":\"bogus\",\"response_text\":\"\"}"),
                    InvalidInput);
    CHECK_THROWS_AS(ReplayClient::from_jsonl("not json"), InvalidInput);
}

TEST_CASE("full-document mode sends the whole markdown as context") {
    const auto doc = fixture_doc("opp-0001");
    ScriptedClient client("{\"minimum_award\": null}");
    ExtractionSettings s;
    s.mode = ExtractionMode::FullDocument;
    s.retry.base_delay = std::chrono::milliseconds(0);
    const auto result = extract_fields(doc, s, client);
    REQUIRE(client.requests.size() == 6);
    const std::string md = doctree::serialize_markdown(doc.root);
    for (const auto& r : client.requests) CHECK(r.prompt.user.rfind("## CONTEXT\n" + md + "\n\n## QUESTION\n", 0) == 0);
    CHECK(result.mode_label == "full_document");
    for (const auto& p : to_predictions(result)) CHECK(p.mode == "full_document");
}

TEST_CASE("retrieval mode sends retrieved chunks and records their ids") {
    const auto doc = fixture_doc("opp-0003");
    ScriptedClient client("{\"<key>\": \"£10,000\"}");
    ExtractionSettings s;
    std::vector<std::string> traces;
    s.trace_sink = [&](const std::string& line) { traces.push_back(line); };
    const auto result = extract_fields(doc, s, client);
    CHECK(traces.size() == 6);
    CHECK(result.mode_label == "hierarchical|0.25|norr");
    const auto& min = result.at(MetadataField::MinimumAward);
    CHECK_FALSE(min.context_chunk_ids.empty());
    CHECK(min.context_chunk_ids.size() <= 5);
    CHECK(min.normalized == NormalizedAnswer::of_money(10000));
    // the percentage field cannot read a money answer: unknown plus a warning
    CHECK(result.at(MetadataField::FundingPercentage).normalized.is_unknown());
    CHECK(result.warnings.count >= 1);
}

TEST_CASE("malformed responses degrade to unknown with a warning") {
    const auto doc = fixture_doc("opp-0002");
    ScriptedClient client("I could not find it.");
    ExtractionSettings s;
    const auto result = extract_fields(doc, s, client);
    for (const auto& f : result.fields) {
        CHECK(f.normalized.is_unknown());
        CHECK_FALSE(f.raw.has_value());
    }
    CHECK(result.warnings.count == 6);
}

TEST_CASE("transport errors are retried then reported") {
    const CompletionRequest req{"d", MetadataField::MinimumAward, {}};
    RetryPolicy policy;
    policy.retries = 2;
    policy.base_delay = std::chrono::milliseconds(0);
    FlakyClient recovers(2);
    CHECK(complete_with_retry(recovers, req, policy).find("1000") != std::string::npos);
    CHECK(recovers.calls == 3);
    FlakyClient dead(3);
    CHECK_THROWS_AS(complete_with_retry(dead, req, policy), CompletionFailure);
    CHECK(dead.calls == 3);
}

TEST_CASE("prediction records round-trip through JSON lines") {
    Prediction p{"opp-1", MetadataField::FundingPercentage, "80%", NormalizedAnswer::of_percent(80), {"opp-1#h/2"},
                 "retrieval", "hierarchical|0.25|norr"};
    const auto line = prediction_to_json(p);
    CHECK(line.find('\n') == std::string::npos);
    const auto back = prediction_from_json(line);
    CHECK(back.doc_id == p.doc_id);
    CHECK(back.field == p.field);
    CHECK(back.raw == p.raw);
    CHECK(back.normalized == p.normalized);
    CHECK(back.context_chunk_ids == p.context_chunk_ids);
    CHECK(back.config == p.config);
    CHECK(read_predictions(line + "\n\n" + line + "\n").size() == 2);
    CHECK_THROWS_AS(read_predictions(line + "\n{bad\n"), InvalidInput);
}

TEST_CASE("http client reports an unreachable endpoint as a transport error") {
    HttpCompletionConfig cfg;
    cfg.base_url = "http://127.0.0.1:9";
    cfg.timeout_seconds = 2;
    const HttpCompletionClient client(cfg);
    CHECK_THROWS_AS(client.complete({"d", MetadataField::MinimumAward, build_prompt("c", "q")}), TransportError);
}
