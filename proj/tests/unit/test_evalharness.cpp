#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "gtrx/errors.hpp"
#include "gtrx/evalharness.hpp"

using namespace gtrx;
using namespace gtrx::eval;
using extraction::Prediction;
using F = MetadataField;

namespace {

GoldAnnotation gold(std::string doc, F field, std::optional<std::string> raw) {
    GoldAnnotation g{std::move(doc), field, raw, normalize_answer(field, raw)};
    return g;
}

Prediction pred(std::string doc, F field, std::optional<std::string> raw) {
    Prediction p;
    p.doc_id = std::move(doc);
    p.field = field;
    p.raw = raw;
    p.normalized = normalize_answer(field, raw);
    p.mode = "retrieval";
    p.config = "hierarchical|0.25|norr";
    return p;
}

doctree::OpportunityDoc doc_with(std::string id, std::map<std::string, std::string> summary, std::string body) {
    doctree::OpportunityDoc d;
    d.opportunity_id = std::move(id);
    d.title = "T";
    d.root.heading = "T";
    d.summary_fields = std::move(summary);
    if (!body.empty()) d.root.blocks.push_back(doctree::Block::paragraph(std::move(body)));
    return d;
}

}  // namespace

TEST_CASE("ten pairs with eight correct and one unknown prediction") {
    std::vector<GoldAnnotation> g;
    std::vector<Prediction> p;
    for (int i = 0; i < 10; ++i) {
        const std::string doc = "d" + std::to_string(i);
        g.push_back(gold(doc, F::MinimumAward, "1000"));
        if (i < 8)
            p.push_back(pred(doc, F::MinimumAward, "£1,000"));
        else if (i == 8)
            p.push_back(pred(doc, F::MinimumAward, "2000"));
        else
            p.push_back(pred(doc, F::MinimumAward, std::nullopt));
    }
    const auto m = score_predictions(g, p);
    CHECK(m.overall.n == 10);
    CHECK(m.overall.accuracy() == doctest::Approx(0.80));
    CHECK(m.overall.unknown_rate() == doctest::Approx(0.10));
    CHECK(m.at(F::MinimumAward).correct == 8);
    CHECK(m.at(F::MaximumAward).n == 0);
}

TEST_CASE("unknown agreement counts as correct and still counts toward unknown rate") {
    const auto m = score_predictions({gold("d", F::FundingPercentage, std::nullopt)},
                                     {pred("d", F::FundingPercentage, std::nullopt)});
    CHECK(m.overall.correct == 1);
    CHECK(m.overall.unknown_predictions == 1);
}

TEST_CASE("missing predictions are reported together") {
    try {
        score_predictions({gold("a", F::MinimumAward, "1"), gold("b", F::MaximumAward, "2")}, {});
        FAIL("expected MissingPrediction");
    } catch (const MissingPrediction& e) {
        const std::string msg = e.what();
        CHECK(msg.find("a") != std::string::npos);
        CHECK(msg.find("maximum_award") != std::string::npos);
    }
}

TEST_CASE("error classification") {
    const auto docs = std::vector<doctree::OpportunityDoc>{
        doc_with("d", {{"Total fund", "£1,200,000"}}, "Projects receive up to 80% of costs and last 2 years."),
    };
    const std::vector<GoldAnnotation> g = {
        gold("d", F::MinimumAward, std::nullopt),       gold("d", F::MaximumAward, "300000"),
        gold("d", F::TotalFunding, std::nullopt),       gold("d", F::FundingPercentage, std::nullopt),
        gold("d", F::MinimumFundingDuration, "12 months"), gold("d", F::MaximumFundingDuration, "24 months"),
    };
    const std::vector<Prediction> p = {
        pred("d", F::MinimumAward, "300000"),          // confused with the maximum
        pred("d", F::MaximumAward, "300000"),          // correct
        pred("d", F::TotalFunding, "£1.2 million"),    // from the summary table
        pred("d", F::FundingPercentage, "75"),         // nowhere in the document
        pred("d", F::MinimumFundingDuration, std::nullopt),  // missed
        pred("d", F::MaximumFundingDuration, "36 months"),   // wrong value
    };
    const auto errors = classify_errors(g, p, docs);
    REQUIRE(errors.size() == 5);

    auto find = [&](F f) {
        return *std::find_if(errors.begin(), errors.end(), [&](const ErrorCase& e) { return e.field == f; });
    };
    const auto fc = find(F::MinimumAward);
    CHECK(fc.category == ErrorCategory::FalsePositive);
    CHECK(fc.fp_subtype == FalsePositiveSubtype{FieldConfusion{F::MaximumAward}});
    CHECK(find(F::TotalFunding).fp_subtype ==
          FalsePositiveSubtype{Hallucination{HallucinationOrigin::MetadataTable}});
    CHECK(find(F::FundingPercentage).fp_subtype == FalsePositiveSubtype{Hallucination{HallucinationOrigin::Fabricated}});
    CHECK(find(F::MinimumFundingDuration).category == ErrorCategory::FalseNegative);
    CHECK(find(F::MaximumFundingDuration).category == ErrorCategory::ValueMismatch);
    CHECK_FALSE(find(F::MaximumFundingDuration).fp_subtype.has_value());

    const auto t = summarize(errors);
    CHECK(t.total == 5);
    CHECK(t.false_positive == 3);
    CHECK(t.field_confusion == 1);
    CHECK(t.hallucination == 2);
    CHECK(t.fabricated == 1);
    CHECK(t.metadata_table == 1);
    CHECK(t.value_mismatch == 1);
    CHECK(t.false_negative == 1);
    CHECK(t.confusion_pairs.at({F::MinimumAward, F::MaximumAward}) == 1);
}

TEST_CASE("value found in the body outside the summary is elsewhere-in-body") {
    const auto docs = std::vector<doctree::OpportunityDoc>{doc_with("d", {}, "Projects receive up to 80% of costs.")};
    const auto errors = classify_errors({gold("d", F::FundingPercentage, std::nullopt)},
                                        {pred("d", F::FundingPercentage, "80")}, docs);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].fp_subtype == FalsePositiveSubtype{Hallucination{HallucinationOrigin::ElsewhereInBody}});
    CHECK_THROWS_AS(classify_errors({gold("x", F::FundingPercentage, std::nullopt)},
                                    {pred("x", F::FundingPercentage, "80")}, docs),
                    InvalidInput);
}

TEST_CASE("value containment respects digit boundaries") {
    CHECK(contains_value("up to £50,000 per award", "50000"));
    CHECK_FALSE(contains_value("up to £150,000", "50000"));
    CHECK_FALSE(contains_value("reference 800", "80"));
    CHECK(contains_value("80%", "80"));
    CHECK_FALSE(contains_value("anything", ""));
}

TEST_CASE("classification is independent of input order") {
    std::vector<GoldAnnotation> g;
    std::vector<Prediction> p;
    for (int i = 0; i < 20; ++i) {
        const std::string d = "d" + std::to_string(i % 5);
        const F f = kAllFields[static_cast<std::size_t>(i / 5)];
        g.push_back(gold(d, f, i % 3 ? std::optional<std::string>("100") : std::nullopt));
        p.push_back(pred(d, f, i % 4 ? std::optional<std::string>("200") : std::nullopt));
    }
    std::vector<doctree::OpportunityDoc> docs;
    for (int i = 0; i < 5; ++i) docs.push_back(doc_with("d" + std::to_string(i), {}, "nothing numeric"));
    const auto base = classify_errors(g, p, docs);
    std::mt19937 rng(3);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(g.begin(), g.end(), rng);
        std::shuffle(p.begin(), p.end(), rng);
        const auto again = classify_errors(g, p, docs);
        REQUIRE(again.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(again[i].doc_id == base[i].doc_id);
            CHECK(again[i].field == base[i].field);
            CHECK(again[i].category == base[i].category);
        }
    }
}

TEST_CASE("percentages use one decimal, rounded half-up") {
    CHECK(percent_1dp(421, 480) == "87.7");
    CHECK(percent_1dp(47, 60) == "78.3");
    CHECK(percent_1dp(1, 8) == "12.5");
    CHECK(percent_1dp(1, 16) == "6.3");
    CHECK(percent_1dp(0, 5) == "0.0");
    CHECK(percent_1dp(5, 5) == "100.0");
    CHECK(percent_1dp(1, 0) == "-");
}

TEST_CASE("report rendering and JSON round-trip") {
    const std::vector<GoldAnnotation> g = {gold("d", F::MinimumAward, "10"), gold("d", F::MaximumAward, std::nullopt)};
    const std::vector<Prediction> p = {pred("d", F::MinimumAward, "10"), pred("d", F::MaximumAward, std::nullopt)};
    Report r;
    r.rows.push_back({"None", std::nullopt, false, score_predictions(g, p)});
    r.rows.push_back({"Hierarchical", 0.25, true, score_predictions(g, p)});
    r.taxonomy_label = "Hierarchical, alpha=0.25, re-ranker on";
    const auto text = render_report(r);
    CHECK(text.find("100.0") != std::string::npos);
    CHECK(text.find("Hierarchical") != std::string::npos);
    // a perfect run still prints the taxonomy block with zeros
    CHECK(text.find("0") != std::string::npos);
    CHECK(r.taxonomy.total == 0);

    const auto back = report_from_json(report_to_json(r));
    CHECK(render_report(back) == text);
    CHECK_THROWS_AS(report_from_json("[]"), InvalidInput);
}

TEST_CASE("gold annotations parse and reject duplicates") {
    const std::string line = gold_to_json(gold("d", F::TotalFunding, "£2 million"));
    const auto g = read_gold(line + "\n");
    REQUIRE(g.size() == 1);
    CHECK(g[0].gold == NormalizedAnswer::of_money(2000000));
    CHECK_THROWS_AS(read_gold(line + "\n" + line + "\n"), InvalidInput);
    const auto raw_only = read_gold("{\"doc_id\":\"d\",\"field\":\"funding_percentage\",\"gold_raw\":\"80%\"}");
    CHECK(raw_only[0].gold == NormalizedAnswer::of_percent(80));
}

TEST_CASE("corpus fixture reproduces its planted error taxonomy") {
    const auto g = read_gold(fixtures::read("corpus/gold.jsonl"));
    CHECK(g.size() == 60);
    std::vector<doctree::OpportunityDoc> docs;
    std::vector<Prediction> p;
    const auto replay = extraction::ReplayClient::from_jsonl(fixtures::read("corpus/replay.jsonl"));
    for (int i = 1; i <= 10; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "opp-%04d", i);
        docs.push_back(doctree::parse_opportunity_html(fixtures::read(std::string("corpus/docs/") + id + ".html"), id));
        extraction::ExtractionSettings s;
        s.mode = extraction::ExtractionMode::FullDocument;
        for (auto& pr : extraction::to_predictions(extraction::extract_fields(docs.back(), s, replay))) p.push_back(pr);
    }
    const auto m = score_predictions(g, p);
    CHECK(percent_1dp(m.overall.correct, m.overall.n) == "88.3");
    CHECK(percent_1dp(m.overall.unknown_predictions, m.overall.n) == "13.3");
    const auto t = summarize(classify_errors(g, p, docs));
    CHECK(t.total == 7);
    CHECK(t.false_positive == 4);
    CHECK(t.field_confusion == 1);
    CHECK(t.fabricated == 1);
    CHECK(t.metadata_table == 1);
    CHECK(t.elsewhere_in_body == 1);
    CHECK(t.value_mismatch == 1);
    CHECK(t.false_negative == 2);
}
