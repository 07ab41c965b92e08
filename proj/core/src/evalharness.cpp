#include "gtrx/evalharness.hpp"

#include <algorithm>
#include <set>

#include "gtrx/errors.hpp"
#include "json_util.hpp"

namespace gtrx::eval {

using detail::ojson;
using Key = std::pair<std::string, MetadataField>;

std::string_view to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::FalsePositive: return "false_positive";
        case ErrorCategory::ValueMismatch: return "value_mismatch";
        case ErrorCategory::FalseNegative: return "false_negative";
    }
    return "value_mismatch";
}

std::string_view to_string(HallucinationOrigin o) {
    switch (o) {
        case HallucinationOrigin::Fabricated: return "fabricated";
        case HallucinationOrigin::MetadataTable: return "metadata_table";
        case HallucinationOrigin::ElsewhereInBody: return "elsewhere_in_body";
    }
    return "fabricated";
}

std::vector<GoldAnnotation> read_gold(std::string_view jsonl) {
    std::vector<GoldAnnotation> out;
    std::set<Key> seen;
    std::size_t pos = 0, line_no = 0;
    while (pos <= jsonl.size()) {
        std::size_t eol = jsonl.find('\n', pos);
        if (eol == std::string_view::npos) eol = jsonl.size();
        const std::string line = text::trim(jsonl.substr(pos, eol - pos));
        ++line_no;
        pos = eol + 1;
        if (line.empty()) continue;
        const std::string where = "gold line " + std::to_string(line_no) + ": ";
        try {
            const auto j = ojson::parse(line);
            GoldAnnotation g;
            g.doc_id = j.at("doc_id").get<std::string>();
            const auto key = j.at("field").get<std::string>();
            const auto field = field_from_key(key);
            if (!field) throw InvalidInput("unknown field '" + key + "'");
            g.field = *field;
            g.gold_raw = detail::optional_string(j, "gold_raw");
            if (j.contains("gold_normalized") && !j.at("gold_normalized").is_null())
                g.gold = detail::answer_from(j.at("gold_normalized"));
            else
                g.gold = normalize_answer(g.field, g.gold_raw);
            if (!seen.insert({g.doc_id, g.field}).second)
                throw InvalidInput("duplicate annotation for (" + g.doc_id + ", " + key + ")");
            out.push_back(std::move(g));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(where + e.what());
        } catch (const InvalidInput& e) {
            throw InvalidInput(where + e.what());
        }
    }
    return out;
}

std::string gold_to_json(const GoldAnnotation& g) {
    ojson j;
    j["doc_id"] = g.doc_id;
    j["field"] = field_key(g.field);
    j["gold_raw"] = g.gold_raw ? ojson(*g.gold_raw) : ojson(nullptr);
    j["gold_normalized"] = detail::answer_json(g.gold);
    return j.dump();
}

namespace {

std::map<Key, const extraction::Prediction*> index_predictions(
    const std::vector<extraction::Prediction>& predictions) {
    std::map<Key, const extraction::Prediction*> out;
    for (const auto& p : predictions) {
        if (!out.emplace(Key{p.doc_id, p.field}, &p).second)
            throw InvalidInput("duplicate prediction for (" + p.doc_id + ", " +
                               std::string(field_key(p.field)) + ")");
    }
    return out;
}

const extraction::Prediction& lookup(const std::map<Key, const extraction::Prediction*>& preds,
                                     const GoldAnnotation& g) {
    const auto it = preds.find({g.doc_id, g.field});
    if (it == preds.end())
        throw MissingPrediction("(" + g.doc_id + ", " + std::string(field_key(g.field)) + ")");
    return *it->second;
}

bool is_correct(const NormalizedAnswer& gold, const NormalizedAnswer& pred) {
    if (gold.is_unknown() || pred.is_unknown()) return gold.is_unknown() && pred.is_unknown();
    return answers_equal(gold, pred);
}

}  // namespace

Metrics score_predictions(const std::vector<GoldAnnotation>& gold,
                          const std::vector<extraction::Prediction>& predictions) {
    const auto preds = index_predictions(predictions);

    std::vector<std::string> missing;
    for (const auto& g : gold)
        if (!preds.count({g.doc_id, g.field}))
            missing.push_back("(" + g.doc_id + ", " + std::string(field_key(g.field)) + ")");
    if (!missing.empty())
        throw MissingPrediction(std::to_string(missing.size()) + " gold pairs lack predictions: " +
                                text::join(missing, ", "));

    Metrics m;
    for (const MetadataField f : kAllFields) m.fields[field_index(f)].field = f;
    for (const auto& g : gold) {
        const auto& p = lookup(preds, g);
        Counts& c = m.fields[field_index(g.field)].counts;
        const bool correct = is_correct(g.gold, p.normalized);
        const bool unknown = p.normalized.is_unknown();
        for (Counts* target : {&c, &m.overall}) {
            ++target->n;
            target->correct += correct ? 1 : 0;
            target->unknown_predictions += unknown ? 1 : 0;
        }
    }
    return m;
}

bool contains_value(std::string_view raw, std::string_view digits) {
    if (digits.empty()) return false;
    std::string t;
    t.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == ',') continue;
        if (static_cast<unsigned char>(raw[i]) == 0xC2 && i + 1 < raw.size() &&
            static_cast<unsigned char>(raw[i + 1]) == 0xA3) {
            ++i;
            continue;
        }
        t.push_back(raw[i]);
    }
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    for (std::size_t at = t.find(digits); at != std::string::npos; at = t.find(digits, at + 1)) {
        const bool left_ok = at == 0 || !is_digit(t[at - 1]);
        const std::size_t end = at + digits.size();
        const bool right_ok = end == t.size() || !is_digit(t[end]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

std::vector<ErrorCase> classify_errors(const std::vector<GoldAnnotation>& gold,
                                       const std::vector<extraction::Prediction>& predictions,
                                       const std::vector<doctree::OpportunityDoc>& docs) {
    const auto preds = index_predictions(predictions);

    std::map<Key, const GoldAnnotation*> gold_by_key;
    for (const auto& g : gold) gold_by_key[{g.doc_id, g.field}] = &g;

    std::map<std::string, const doctree::OpportunityDoc*> doc_by_id;
    for (const auto& d : docs) doc_by_id[d.opportunity_id] = &d;

    std::vector<ErrorCase> out;
    for (const auto& [key, gp] : gold_by_key) {
        const GoldAnnotation& g = *gp;
        const auto& p = lookup(preds, g);
        if (is_correct(g.gold, p.normalized)) continue;

        ErrorCase e{g.doc_id, g.field, ErrorCategory::ValueMismatch, std::nullopt, g.gold, p.normalized};
        if (g.gold.is_unknown()) {
            e.category = ErrorCategory::FalsePositive;
        } else if (p.normalized.is_unknown()) {
            e.category = ErrorCategory::FalseNegative;
        }

        if (e.category == ErrorCategory::FalsePositive) {
            for (const MetadataField other : kAllFields) {
                if (other == g.field) continue;
                const auto it = gold_by_key.find({g.doc_id, other});
                if (it == gold_by_key.end() || it->second->gold.is_unknown()) continue;
                if (answers_equal(it->second->gold, p.normalized)) {
                    e.fp_subtype = FieldConfusion{other};
                    break;
                }
            }
            if (!e.fp_subtype) {
                const auto d = doc_by_id.find(g.doc_id);
                if (d == doc_by_id.end())
                    throw InvalidInput("classify_errors: no document for '" + g.doc_id + "'");
                const std::string digits = value_digits(p.normalized);
                auto origin = HallucinationOrigin::Fabricated;
                const bool in_table = std::any_of(
                    d->second->summary_fields.begin(), d->second->summary_fields.end(),
                    [&](const auto& kv) { return contains_value(kv.second, digits); });
                if (in_table)
                    origin = HallucinationOrigin::MetadataTable;
                else if (contains_value(doctree::serialize_markdown(d->second->root), digits))
                    origin = HallucinationOrigin::ElsewhereInBody;
                e.fp_subtype = Hallucination{origin};
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

Taxonomy summarize(const std::vector<ErrorCase>& errors) {
    Taxonomy t;
    for (const auto& e : errors) {
        ++t.total;
        switch (e.category) {
            case ErrorCategory::FalsePositive: ++t.false_positive; break;
            case ErrorCategory::ValueMismatch: ++t.value_mismatch; break;
            case ErrorCategory::FalseNegative: ++t.false_negative; break;
        }
        if (!e.fp_subtype) continue;
        if (const auto* fc = std::get_if<FieldConfusion>(&*e.fp_subtype)) {
            ++t.field_confusion;
            ++t.confusion_pairs[{e.field, fc->confused_with}];
        } else {
            const auto& h = std::get<Hallucination>(*e.fp_subtype);
            ++t.hallucination;
            switch (h.origin) {
                case HallucinationOrigin::Fabricated: ++t.fabricated; break;
                case HallucinationOrigin::MetadataTable: ++t.metadata_table; break;
                case HallucinationOrigin::ElsewhereInBody: ++t.elsewhere_in_body; break;
            }
        }
    }
    return t;
}

}  // namespace gtrx::eval
