#include <json.hpp>

#include "gtrx/csv.hpp"
#include "gtrx/errors.hpp"
#include "gtrx/fileio.hpp"
#include "gtrx/store.hpp"

namespace gtrx::store {

namespace {

using ojson = nlohmann::ordered_json;

ojson opt(const std::optional<std::string>& s) { return s ? ojson(*s) : ojson(nullptr); }

std::string date_cell(const std::optional<Date>& d) { return d ? d->iso() : ""; }

std::string payload_cell(const Outcome& o, std::string_view field) {
    const auto it = o.payload.find(std::string(field));
    if (it == o.payload.end()) return "";
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    return std::to_string(std::get<std::int64_t>(it->second));
}

const std::map<std::string, std::vector<std::string>>& headers() {
    static const auto table = [] {
        std::map<std::string, std::vector<std::string>> h = {
            {"projects", {"id", "grant_reference", "council", "title", "abstract", "lead_organisation_id"}},
            {"project_funding", {"project_id", "position", "amount", "funder", "start", "end"}},
            {"persons", {"id", "first_name", "surname", "orcid"}},
            {"person_organisations", {"person_id", "organisation_id"}},
            {"organisations", {"id", "name"}},
            {"organisation_variant_names", {"organisation_id", "variant_name"}},
            {"project_members", {"id", "project_id", "person_id", "role"}},
            {"project_partners", {"id", "project_id", "organisation_id", "role"}},
            {"outcomes", {"id", "project_id", "kind"}},
        };
        for (auto kind : kAllOutcomeKinds) {
            std::vector<std::string> cols{"outcome_id"};
            for (const auto& f : payload_schema(kind)) cols.emplace_back(f.name);
            h.emplace("outcome_" + std::string(to_string(kind)), std::move(cols));
        }
        return h;
    }();
    return table;
}

class TableWriter {
public:
    TableWriter(const std::filesystem::path& dir, std::vector<std::filesystem::path>& written)
        : dir_(dir), written_(written) {}

    void csv(std::string_view table, const std::vector<std::vector<std::string>>& rows) {
        std::string out = csv::format_row(csv_header(table));
        for (const auto& r : rows) out += csv::format_row(r);
        write(std::string(table) + ".csv", out);
    }

    void jsonl(std::string_view table, const std::string& content) { write(std::string(table) + ".jsonl", content); }

private:
    void write(const std::string& name, const std::string& content) {
        const auto path = dir_ / name;
        fileio::write_file_atomic(path, content);
        written_.push_back(path);
    }

    std::filesystem::path dir_;
    std::vector<std::filesystem::path>& written_;
};

}  // namespace

const std::vector<std::string>& csv_header(std::string_view table) {
    const auto it = headers().find(std::string(table));
    if (it == headers().end()) throw InvalidInput("unknown export table '" + std::string(table) + "'");
    return it->second;
}

bool ExportSelection::includes(std::string_view table) const {
    if (tables.empty()) return true;
    for (const auto& t : tables)
        if (t == table) return true;
    return false;
}

std::string to_jsonl(const Project& p) {
    ojson funding = ojson::array();
    for (const auto& f : p.funding) {
        ojson e{{"amount", f.amount}, {"funder", f.funder}};
        e["start"] = f.start ? ojson(f.start->iso()) : ojson(nullptr);
        e["end"] = f.end ? ojson(f.end->iso()) : ojson(nullptr);
        funding.push_back(std::move(e));
    }
    ojson j{{"type", "project"},       {"id", p.id},           {"grant_reference", p.grant_reference},
            {"council", p.council},    {"title", p.title},     {"abstract", p.abstract_text},
            {"funding", std::move(funding)}, {"lead_organisation_id", opt(p.lead_organisation_id)}};
    return j.dump() + "\n";
}

std::string to_jsonl(const Person& p) {
    ojson j{{"type", "person"},         {"id", p.id},       {"first_name", p.first_name},
            {"surname", p.surname},     {"orcid", opt(p.orcid)}, {"organisation_ids", p.organisation_ids}};
    return j.dump() + "\n";
}

std::string to_jsonl(const Organisation& o) {
    ojson j{{"type", "organisation"}, {"id", o.id}, {"name", o.name}, {"variant_names", o.variant_names}};
    return j.dump() + "\n";
}

std::string to_jsonl(const ProjectMember& m) {
    ojson j{{"type", "project_member"}, {"id", m.id}, {"project_id", m.project_id},
            {"person_id", m.person_id},   {"role", m.role}};
    return j.dump() + "\n";
}

std::string to_jsonl(const ProjectPartner& p) {
    ojson j{{"type", "project_partner"},         {"id", p.id}, {"project_id", p.project_id},
            {"organisation_id", p.organisation_id}, {"role", p.role}};
    return j.dump() + "\n";
}

std::string to_jsonl(const Outcome& o) {
    ojson payload = ojson::object();
    for (const auto& f : payload_schema(o.kind)) {
        const auto it = o.payload.find(std::string(f.name));
        if (it == o.payload.end()) continue;
        if (const auto* s = std::get_if<std::string>(&it->second))
            payload[std::string(f.name)] = *s;
        else
            payload[std::string(f.name)] = std::get<std::int64_t>(it->second);
    }
    ojson j{{"type", "outcome"}, {"id", o.id}, {"project_id", o.project_id}, {"kind", to_string(o.kind)},
            {"payload", std::move(payload)}};
    return j.dump() + "\n";
}

std::vector<std::filesystem::path> export_store(const Store& store, const std::filesystem::path& dir,
                                                const ExportSelection& selection) {
    std::vector<std::filesystem::path> written;
    TableWriter w(dir, written);

    if (selection.includes("projects")) {
        std::string lines;
        std::vector<std::vector<std::string>> rows, funding;
        for (const auto& [id, p] : store.projects()) {
            lines += to_jsonl(p);
            rows.push_back({id, p.grant_reference, p.council, p.title, p.abstract_text,
                            p.lead_organisation_id.value_or("")});
            for (std::size_t i = 0; i < p.funding.size(); ++i) {
                const auto& f = p.funding[i];
                funding.push_back({id, std::to_string(i), std::to_string(f.amount), f.funder, date_cell(f.start),
                                   date_cell(f.end)});
            }
        }
        w.jsonl("projects", lines);
        w.csv("projects", rows);
        w.csv("project_funding", funding);
    }
    if (selection.includes("persons")) {
        std::string lines;
        std::vector<std::vector<std::string>> rows, links;
        for (const auto& [id, p] : store.persons()) {
            lines += to_jsonl(p);
            rows.push_back({id, p.first_name, p.surname, p.orcid.value_or("")});
            for (const auto& org : p.organisation_ids) links.push_back({id, org});
        }
        w.jsonl("persons", lines);
        w.csv("persons", rows);
        w.csv("person_organisations", links);
    }
    if (selection.includes("organisations")) {
        std::string lines;
        std::vector<std::vector<std::string>> rows, variants;
        for (const auto& [id, o] : store.organisations()) {
            lines += to_jsonl(o);
            rows.push_back({id, o.name});
            for (const auto& v : o.variant_names) variants.push_back({id, v});
        }
        w.jsonl("organisations", lines);
        w.csv("organisations", rows);
        w.csv("organisation_variant_names", variants);
    }
    if (selection.includes("project_members")) {
        std::string lines;
        std::vector<std::vector<std::string>> rows;
        for (const auto& [id, m] : store.members()) {
            lines += to_jsonl(m);
            rows.push_back({id, m.project_id, m.person_id, m.role});
        }
        w.jsonl("project_members", lines);
        w.csv("project_members", rows);
    }
    if (selection.includes("project_partners")) {
        std::string lines;
        std::vector<std::vector<std::string>> rows;
        for (const auto& [id, p] : store.partners()) {
            lines += to_jsonl(p);
            rows.push_back({id, p.project_id, p.organisation_id, p.role});
        }
        w.jsonl("project_partners", lines);
        w.csv("project_partners", rows);
    }
    if (selection.includes("outcomes")) {
        std::string lines;
        std::vector<std::vector<std::string>> rows;
        std::map<OutcomeKind, std::vector<std::vector<std::string>>> children;
        for (const auto& [id, o] : store.outcomes()) {
            lines += to_jsonl(o);
            rows.push_back({id, o.project_id, std::string(to_string(o.kind))});
            std::vector<std::string> child{id};
            for (const auto& f : payload_schema(o.kind)) child.push_back(payload_cell(o, f.name));
            children[o.kind].push_back(std::move(child));
        }
        w.jsonl("outcomes", lines);
        w.csv("outcomes", rows);
        for (auto kind : kAllOutcomeKinds) w.csv("outcome_" + std::string(to_string(kind)), children[kind]);
    }
    return written;
}

}  // namespace gtrx::store
