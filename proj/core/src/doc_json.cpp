#include <json.hpp>

#include "gtrx/doctree.hpp"
#include "gtrx/errors.hpp"

namespace gtrx::doctree {

namespace {

using ojson = nlohmann::ordered_json;

ojson node_json(const DocNode& n) {
    ojson blocks = ojson::array();
    for (const auto& b : n.blocks) {
        if (b.kind == Block::Kind::Paragraph)
            blocks.push_back(ojson{{"kind", "paragraph"}, {"text", b.text}});
        else
            blocks.push_back(ojson{{"kind", "list"}, {"items", b.items}});
    }
    ojson children = ojson::array();
    for (const auto& c : n.children) children.push_back(node_json(c));
    return ojson{{"heading", n.heading}, {"level", n.level}, {"blocks", std::move(blocks)},
                 {"children", std::move(children)}};
}

DocNode node_from(const ojson& j) {
    DocNode n;
    n.heading = j.at("heading").get<std::string>();
    n.level = j.at("level").get<int>();
    for (const auto& b : j.at("blocks")) {
        const auto kind = b.at("kind").get<std::string>();
        if (kind == "paragraph")
            n.blocks.push_back(Block::paragraph(b.at("text").get<std::string>()));
        else if (kind == "list")
            n.blocks.push_back(Block::list(b.at("items").get<std::vector<std::string>>()));
        else
            throw InvalidInput("unknown block kind '" + kind + "'");
    }
    for (const auto& c : j.at("children")) n.children.push_back(node_from(c));
    return n;
}

}  // namespace

std::string to_json(const OpportunityDoc& doc) {
    ojson summary = ojson::object();
    for (const auto& [k, v] : doc.summary_fields) summary[k] = v;
    ojson updates = ojson::array();
    for (const auto& u : doc.updates) updates.push_back(ojson{{"date", u.date.iso()}, {"text", u.text}});
    ojson j{{"opportunity_id", doc.opportunity_id},
            {"title", doc.title},
            {"summary_fields", std::move(summary)},
            {"root", node_json(doc.root)},
            {"updates", std::move(updates)}};
    return j.dump(2) + "\n";
}

OpportunityDoc from_json(std::string_view json) {
    try {
        const ojson j = ojson::parse(json);
        OpportunityDoc doc;
        doc.opportunity_id = j.at("opportunity_id").get<std::string>();
        if (doc.opportunity_id.empty()) throw InvalidInput("opportunity_id must be non-empty");
        doc.title = j.value("title", std::string{});
        if (j.contains("summary_fields"))
            for (const auto& [k, v] : j.at("summary_fields").items()) doc.summary_fields[k] = v.get<std::string>();
        doc.root = node_from(j.at("root"));
        if (j.contains("updates")) {
            for (const auto& u : j.at("updates")) {
                auto d = Date::parse_iso(u.at("date").get<std::string>());
                if (!d) throw InvalidInput("invalid update date in document '" + doc.opportunity_id + "'");
                doc.updates.push_back({*d, u.at("text").get<std::string>()});
            }
        }
        if (doc.root.level != 1 || !is_valid(doc.root))
            throw InvalidInput("document '" + doc.opportunity_id + "' has an invalid tree");
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("opportunity JSON: ") + e.what());
    }
}

}  // namespace gtrx::doctree
