#include <cstdio>

#include "gtrx/errors.hpp"
#include "gtrx/evalharness.hpp"
#include "json_util.hpp"

namespace gtrx::eval {

using detail::ojson;

namespace {

std::size_t display_width(std::string_view s) {
    std::size_t w = 0;
    for (char c : s)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++w;
    return w;
}

std::string pad(std::string_view s, std::size_t width, bool right_align = false) {
    const std::size_t w = display_width(s);
    std::string fill(w < width ? width - w : 0, ' ');
    return right_align ? fill + std::string(s) : std::string(s) + fill;
}

std::string alpha_text(const std::optional<double>& alpha) {
    if (!alpha) return "---";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", *alpha);
    return buf;
}

ojson counts_json(const Counts& c) {
    return ojson{{"n", c.n},
                 {"correct", c.correct},
                 {"unknown_predictions", c.unknown_predictions},
                 {"accuracy_pct", percent_1dp(c.correct, c.n)},
                 {"unknown_pct", percent_1dp(c.unknown_predictions, c.n)}};
}

Counts counts_from(const ojson& j) {
    Counts c;
    c.n = j.at("n").get<std::size_t>();
    c.correct = j.at("correct").get<std::size_t>();
    c.unknown_predictions = j.at("unknown_predictions").get<std::size_t>();
    return c;
}

}  // namespace

std::string percent_1dp(std::size_t numerator, std::size_t denominator) {
    if (denominator == 0) return "-";
    // tenths of a percent, rounded half-up on the exact ratio
    const unsigned long long tenths =
        (2ull * numerator * 1000ull + denominator) / (2ull * denominator);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::string render_report(const Report& report) {
    constexpr std::size_t kChunkerW = 14, kAlphaW = 6, kRrW = 4, kNumW = 9;
    std::string out;

    out += pad("Chunker", kChunkerW) + pad("α", kAlphaW) + pad("RR", kRrW);
    for (const MetadataField f : kAllFields) out += pad(field_column(f), kNumW, true);
    out += pad("Acc (%)", kNumW, true) + pad("Unk (%)", kNumW, true) + "\n";
    const std::size_t rule_width = kChunkerW + kAlphaW + kRrW + 8 * kNumW;
    out += std::string(rule_width, '-') + "\n";

    std::string previous_group;
    for (const auto& row : report.rows) {
        if (!previous_group.empty() && row.chunker != previous_group) out += "\n";
        previous_group = row.chunker;
        out += pad(row.chunker, kChunkerW) + pad(alpha_text(row.alpha), kAlphaW) +
               pad(row.reranker ? "✓" : "", kRrW);
        for (const MetadataField f : kAllFields) {
            const Counts& c = row.metrics.at(f);
            out += pad(percent_1dp(c.correct, c.n), kNumW, true);
        }
        const Counts& o = row.metrics.overall;
        out += pad(percent_1dp(o.correct, o.n), kNumW, true);
        out += pad(percent_1dp(o.unknown_predictions, o.n), kNumW, true);
        out += "\n";
    }

    const Taxonomy& t = report.taxonomy;
    out += "\nError taxonomy";
    if (!report.taxonomy_label.empty()) out += " (" + report.taxonomy_label + ")";
    out += ": " + std::to_string(t.total) + " errors\n";
    auto line = [&](std::string_view name, std::size_t count, int indent, bool share) {
        out += std::string(static_cast<std::size_t>(indent), ' ') +
               pad(name, 24 - static_cast<std::size_t>(indent)) + pad(std::to_string(count), 6, true);
        if (share) out += pad(percent_1dp(count, t.total) + "%", 9, true);
        out += "\n";
    };
    line("false_positive", t.false_positive, 2, true);
    line("field_confusion", t.field_confusion, 4, false);
    line("hallucination", t.hallucination, 4, false);
    line("fabricated", t.fabricated, 6, false);
    line("metadata_table", t.metadata_table, 6, false);
    line("elsewhere_in_body", t.elsewhere_in_body, 6, false);
    line("value_mismatch", t.value_mismatch, 2, true);
    line("false_negative", t.false_negative, 2, true);
    if (!t.confusion_pairs.empty()) {
        out += "Field confusion pairs (asked -> returned):\n";
        for (const auto& [pair, count] : t.confusion_pairs) {
            out += "  " + std::string(field_key(pair.first)) + " -> " + std::string(field_key(pair.second)) +
                   "  " + std::to_string(count) + "\n";
        }
    }
    return out;
}

std::string report_to_json(const Report& report) {
    ojson rows = ojson::array();
    for (const auto& r : report.rows) {
        ojson fields = ojson::object();
        for (const MetadataField f : kAllFields) fields[std::string(field_key(f))] = counts_json(r.metrics.at(f));
        rows.push_back(ojson{{"chunker", r.chunker},
                             {"alpha", r.alpha ? ojson(*r.alpha) : ojson(nullptr)},
                             {"reranker", r.reranker},
                             {"fields", std::move(fields)},
                             {"overall", counts_json(r.metrics.overall)}});
    }
    const Taxonomy& t = report.taxonomy;
    ojson pairs = ojson::array();
    for (const auto& [pair, count] : t.confusion_pairs)
        pairs.push_back(ojson{{"asked", field_key(pair.first)}, {"returned", field_key(pair.second)}, {"count", count}});
    ojson taxonomy{{"label", report.taxonomy_label},
                   {"total", t.total},
                   {"false_positive", t.false_positive},
                   {"false_positive_pct", percent_1dp(t.false_positive, t.total)},
                   {"field_confusion", t.field_confusion},
                   {"hallucination", t.hallucination},
                   {"fabricated", t.fabricated},
                   {"metadata_table", t.metadata_table},
                   {"elsewhere_in_body", t.elsewhere_in_body},
                   {"value_mismatch", t.value_mismatch},
                   {"false_negative", t.false_negative},
                   {"confusion_pairs", std::move(pairs)}};
    return ojson{{"rows", std::move(rows)}, {"taxonomy", std::move(taxonomy)}}.dump(2) + "\n";
}

Report report_from_json(std::string_view json) {
    try {
        const auto j = ojson::parse(json);
        Report r;
        for (const auto& row : j.at("rows")) {
            ReportRow rr;
            rr.chunker = row.at("chunker").get<std::string>();
            if (!row.at("alpha").is_null()) rr.alpha = row.at("alpha").get<double>();
            rr.reranker = row.at("reranker").get<bool>();
            for (const MetadataField f : kAllFields) {
                rr.metrics.fields[field_index(f)].field = f;
                rr.metrics.fields[field_index(f)].counts = counts_from(row.at("fields").at(std::string(field_key(f))));
            }
            rr.metrics.overall = counts_from(row.at("overall"));
            r.rows.push_back(std::move(rr));
        }
        const auto& t = j.at("taxonomy");
        r.taxonomy_label = t.value("label", std::string{});
        r.taxonomy.total = t.at("total").get<std::size_t>();
        r.taxonomy.false_positive = t.at("false_positive").get<std::size_t>();
        r.taxonomy.field_confusion = t.at("field_confusion").get<std::size_t>();
        r.taxonomy.hallucination = t.at("hallucination").get<std::size_t>();
        r.taxonomy.fabricated = t.at("fabricated").get<std::size_t>();
        r.taxonomy.metadata_table = t.at("metadata_table").get<std::size_t>();
        r.taxonomy.elsewhere_in_body = t.at("elsewhere_in_body").get<std::size_t>();
        r.taxonomy.value_mismatch = t.at("value_mismatch").get<std::size_t>();
        r.taxonomy.false_negative = t.at("false_negative").get<std::size_t>();
        for (const auto& p : t.at("confusion_pairs")) {
            auto asked = field_from_key(p.at("asked").get<std::string>());
            auto returned = field_from_key(p.at("returned").get<std::string>());
            if (!asked || !returned) throw InvalidInput("unknown field in confusion pair");
            r.taxonomy.confusion_pairs[{*asked, *returned}] = p.at("count").get<std::size_t>();
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("report JSON: ") + e.what());
    }
}

}  // namespace gtrx::eval
