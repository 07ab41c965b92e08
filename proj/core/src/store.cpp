#include "gtrx/store.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/uuid5.hpp"

namespace gtrx::store {

namespace {

using json = nlohmann::json;

struct Violation {
    std::string message;
};

[[noreturn]] void violate(const std::string& message) { throw Violation{message}; }

void allow_keys(const json& j, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : j.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) violate("unexpected field '" + k + "'");
}

std::optional<std::string> opt_text(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) violate(std::string("field '") + key + "' must be a string");
    std::string s = text::trim(it->get<std::string>());
    if (s.empty()) return std::nullopt;
    return s;
}

std::string req_text(const json& j, const char* key) {
    auto s = opt_text(j, key);
    if (!s) violate(std::string("field '") + key + "' is required and non-empty");
    return *s;
}

std::vector<std::string> text_list(const json& j, const char* key) {
    std::vector<std::string> out;
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return out;
    if (!it->is_array()) violate(std::string("field '") + key + "' must be an array");
    for (const auto& e : *it) {
        if (!e.is_string() || text::trim(e.get<std::string>()).empty())
            violate(std::string("field '") + key + "' must hold non-empty strings");
        out.push_back(text::trim(e.get<std::string>()));
    }
    return out;
}

std::optional<Date> opt_date(const json& j, const char* key) {
    const auto s = opt_text(j, key);
    if (!s) return std::nullopt;
    auto d = Date::parse_iso(*s);
    if (!d) violate(std::string("field '") + key + "' must be an ISO date");
    return d;
}

/// Reuses a source id when given, else derives one from the natural key.
std::string resolve_id(const json& j, std::string_view kind, std::string_view council, std::string_view key,
                       IngestSummary& summary) {
    if (auto id = opt_text(j, "id")) {
        ++summary.ids_reused;
        return *id;
    }
    ++summary.ids_derived;
    return ids::derive_id(kind, council, key);
}

Project parse_project(const json& j, IngestSummary& s) {
    allow_keys(j, {"type", "id", "grant_reference", "council", "title", "abstract", "funding", "lead_organisation_id"});
    Project p;
    p.grant_reference = req_text(j, "grant_reference");
    p.council = opt_text(j, "council").value_or("");
    p.title = req_text(j, "title");
    p.abstract_text = req_text(j, "abstract");
    p.lead_organisation_id = opt_text(j, "lead_organisation_id");
    const auto f = j.find("funding");
    if (f == j.end() || !f->is_array() || f->empty()) violate("field 'funding' must be a non-empty array");
    for (const auto& e : *f) {
        if (!e.is_object()) violate("funding entries must be objects");
        allow_keys(e, {"amount", "funder", "start", "end"});
        FundingRecord r;
        const auto a = e.find("amount");
        if (a == e.end() || !a->is_number_integer() || a->get<std::int64_t>() < 0)
            violate("funding amount must be a non-negative integer");
        r.amount = a->get<std::int64_t>();
        r.funder = req_text(e, "funder");
        r.start = opt_date(e, "start");
        r.end = opt_date(e, "end");
        p.funding.push_back(std::move(r));
    }
    p.id = resolve_id(j, "project", p.council, p.grant_reference, s);
    return p;
}

Person parse_person(const json& j, IngestSummary& s) {
    allow_keys(j, {"type", "id", "first_name", "surname", "orcid", "organisation_ids"});
    Person p;
    p.first_name = opt_text(j, "first_name").value_or("");
    p.surname = req_text(j, "surname");
    p.orcid = opt_text(j, "orcid");
    p.organisation_ids = text_list(j, "organisation_ids");
    const std::string key = p.orcid ? *p.orcid
                                    : p.first_name + " " + p.surname + "/" +
                                          (p.organisation_ids.empty() ? "" : p.organisation_ids.front());
    p.id = resolve_id(j, "person", "", key, s);
    return p;
}

Organisation parse_organisation(const json& j, IngestSummary& s) {
    allow_keys(j, {"type", "id", "name", "variant_names"});
    Organisation o;
    o.name = req_text(j, "name");
    o.variant_names = text_list(j, "variant_names");
    o.id = resolve_id(j, "organisation", "", o.name, s);
    return o;
}

ProjectMember parse_member(const json& j, IngestSummary& s) {
    allow_keys(j, {"type", "id", "project_id", "person_id", "role"});
    ProjectMember m;
    m.project_id = req_text(j, "project_id");
    m.person_id = req_text(j, "person_id");
    m.role = opt_text(j, "role").value_or("");
    m.id = resolve_id(j, "project_member", "", m.project_id + "/" + m.person_id + "/" + m.role, s);
    return m;
}

ProjectPartner parse_partner(const json& j, IngestSummary& s) {
    allow_keys(j, {"type", "id", "project_id", "organisation_id", "role"});
    ProjectPartner p;
    p.project_id = req_text(j, "project_id");
    p.organisation_id = req_text(j, "organisation_id");
    p.role = opt_text(j, "role").value_or("");
    p.id = resolve_id(j, "project_partner", "", p.project_id + "/" + p.organisation_id + "/" + p.role, s);
    return p;
}

Outcome parse_outcome(const json& j, IngestSummary& s) {
    allow_keys(j, {"type", "id", "project_id", "kind", "payload"});
    Outcome o;
    o.project_id = req_text(j, "project_id");
    const auto kind = outcome_kind_from(req_text(j, "kind"));
    if (!kind) violate("unknown outcome kind");
    o.kind = *kind;
    const auto p = j.find("payload");
    if (p == j.end() || !p->is_object()) violate("field 'payload' must be an object");
    const auto& schema = payload_schema(o.kind);
    for (const auto& [k, v] : p->items()) {
        const auto f = std::find_if(schema.begin(), schema.end(), [&](const PayloadField& pf) { return pf.name == k; });
        if (f == schema.end()) violate("field '" + k + "' does not belong to a " + std::string(to_string(o.kind)) + " outcome");
        if (v.is_null()) continue;
        if (f->type == PayloadType::Integer) {
            if (!v.is_number_integer()) violate("payload field '" + k + "' must be an integer");
            o.payload[k] = v.get<std::int64_t>();
        } else {
            if (!v.is_string()) violate("payload field '" + k + "' must be a string");
            std::string t = text::trim(v.get<std::string>());
            if (!t.empty()) o.payload[k] = std::move(t);
        }
    }
    for (const auto& f : schema)
        if (f.required && !o.payload.count(std::string(f.name)))
            violate("payload field '" + std::string(f.name) + "' is required");
    std::string key = o.project_id + "/" + std::string(to_string(o.kind));
    for (const auto& [k, v] : o.payload)
        key += "/" + k + "=" + (std::holds_alternative<std::string>(v) ? std::get<std::string>(v)
                                                                       : std::to_string(std::get<std::int64_t>(v)));
    o.id = resolve_id(j, "outcome", "", key, s);
    return o;
}

template <typename T>
void insert_unique(std::map<std::string, T>& table, T record, const char* name) {
    if (table.count(record.id)) violate(std::string("duplicate ") + name + " id '" + record.id + "'");
    std::string id = record.id;
    table.emplace(std::move(id), std::move(record));
}

}  // namespace

std::string_view to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Publication: return "publication";
        case OutcomeKind::Collaboration: return "collaboration";
        case OutcomeKind::Dissemination: return "dissemination";
        case OutcomeKind::PolicyInfluence: return "policy_influence";
        case OutcomeKind::IntellectualProperty: return "intellectual_property";
        case OutcomeKind::SpinOut: return "spin_out";
        case OutcomeKind::Other: return "other";
    }
    return "other";
}

std::optional<OutcomeKind> outcome_kind_from(std::string_view s) {
    for (auto k : kAllOutcomeKinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

const std::vector<PayloadField>& payload_schema(OutcomeKind kind) {
    using T = PayloadType;
    static const std::map<OutcomeKind, std::vector<PayloadField>> schemas = {
        {OutcomeKind::Publication,
         {{"title", T::Text, true}, {"journal", T::Text, false}, {"year", T::Integer, false},
          {"doi", T::Text, false}, {"authors", T::Text, false}}},
        {OutcomeKind::Collaboration,
         {{"partner_organisation", T::Text, true}, {"sector", T::Text, false}, {"description", T::Text, false},
          {"start_year", T::Integer, false}}},
        {OutcomeKind::Dissemination,
         {{"form", T::Text, true}, {"audience", T::Text, false}, {"description", T::Text, false},
          {"year", T::Integer, false}}},
        {OutcomeKind::PolicyInfluence,
         {{"description", T::Text, true}, {"policy_type", T::Text, false}, {"geographic_reach", T::Text, false},
          {"year", T::Integer, false}}},
        {OutcomeKind::IntellectualProperty,
         {{"title", T::Text, true}, {"protection", T::Text, false}, {"patent_id", T::Text, false},
          {"year", T::Integer, false}}},
        {OutcomeKind::SpinOut,
         {{"company_name", T::Text, true}, {"company_number", T::Text, false}, {"year", T::Integer, false}}},
        {OutcomeKind::Other, {{"description", T::Text, true}, {"category", T::Text, false}}},
    };
    return schemas.at(kind);
}

IngestSummary Store::ingest(std::string_view jsonl) {
    IngestSummary s;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < jsonl.size()) {
        const auto end = std::min(jsonl.find('\n', start), jsonl.size());
        const std::string line = text::trim(jsonl.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        ++s.records_read;
        try {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception&) {
                violate("not valid JSON");
            }
            if (!j.is_object()) violate("record must be an object");
            const std::string type = req_text(j, "type");
            if (type == "project")
                insert_unique(projects_, parse_project(j, s), "project");
            else if (type == "person")
                insert_unique(persons_, parse_person(j, s), "person");
            else if (type == "organisation")
                insert_unique(organisations_, parse_organisation(j, s), "organisation");
            else if (type == "project_member")
                insert_unique(members_, parse_member(j, s), "project_member");
            else if (type == "project_partner")
                insert_unique(partners_, parse_partner(j, s), "project_partner");
            else if (type == "outcome")
                insert_unique(outcomes_, parse_outcome(j, s), "outcome");
            else
                violate("unknown record type '" + type + "'");
            ++s.stored;
        } catch (const Violation& v) {
            ++s.schema_violations;
            s.violations.push_back("line " + std::to_string(line_no) + ": " + v.message);
        }
    }
    s.references_total = reference_count();
    s.dangling = dangling_refs().size();
    s.references_resolved = s.references_total - s.dangling;
    return s;
}

std::size_t Store::size() const {
    return projects_.size() + persons_.size() + organisations_.size() + members_.size() + partners_.size() +
           outcomes_.size();
}

std::size_t Store::reference_count() const {
    std::size_t n = 2 * members_.size() + 2 * partners_.size() + outcomes_.size();
    for (const auto& [id, p] : projects_) n += p.lead_organisation_id ? 1 : 0;
    for (const auto& [id, p] : persons_) n += p.organisation_ids.size();
    return n;
}

std::vector<DanglingRef> Store::dangling_refs() const {
    std::vector<DanglingRef> out;
    auto check = [&](const auto& table, const char* source, const std::string& id, std::string field,
                     const char* target, const std::string& target_id) {
        if (!table.count(target_id)) out.push_back({source, id, std::move(field), target, target_id});
    };
    for (const auto& [id, p] : projects_)
        if (p.lead_organisation_id)
            check(organisations_, "projects", id, "lead_organisation_id", "organisations", *p.lead_organisation_id);
    for (const auto& [id, p] : persons_)
        for (std::size_t i = 0; i < p.organisation_ids.size(); ++i)
            check(organisations_, "persons", id, "organisation_ids[" + std::to_string(i) + "]", "organisations",
                  p.organisation_ids[i]);
    for (const auto& [id, m] : members_) {
        check(projects_, "project_members", id, "project_id", "projects", m.project_id);
        check(persons_, "project_members", id, "person_id", "persons", m.person_id);
    }
    for (const auto& [id, p] : partners_) {
        check(projects_, "project_partners", id, "project_id", "projects", p.project_id);
        check(organisations_, "project_partners", id, "organisation_id", "organisations", p.organisation_id);
    }
    for (const auto& [id, o] : outcomes_) check(projects_, "outcomes", id, "project_id", "projects", o.project_id);
    std::sort(out.begin(), out.end());
    return out;
}

OrphanReport orphan_report(const Store& store) {
    OrphanReport r;
    const auto dangling = store.dangling_refs();
    r.dangling_references = dangling.size();
    std::set<std::string> members, partners, outcomes;
    for (const auto& d : dangling) {
        if (d.source_table == "project_members") members.insert(d.source_id);
        else if (d.source_table == "project_partners") partners.insert(d.source_id);
        else if (d.source_table == "outcomes") outcomes.insert(d.source_id);
        else if (d.source_table == "persons") ++r.orphan_affiliations;
    }
    r.orphan_members = members.size();
    r.orphan_partners = partners.size();
    r.orphan_outcomes = outcomes.size();
    std::set<std::string> staffed;
    for (const auto& [id, m] : store.members()) staffed.insert(m.project_id);
    for (const auto& [id, p] : store.projects()) r.projects_without_members += staffed.count(id) ? 0 : 1;
    return r;
}

std::string render_orphan_report(const OrphanReport& r) {
    std::string out;
    auto line = [&](const char* label, std::size_t n) { out += std::string(label) + ": " + std::to_string(n) + "\n"; };
    line("orphaned project member records", r.orphan_members);
    line("orphaned project partner records", r.orphan_partners);
    line("projects with no team members", r.projects_without_members);
    line("orphaned outcome records", r.orphan_outcomes);
    line("orphaned person affiliations", r.orphan_affiliations);
    line("dangling references", r.dangling_references);
    return out;
}

std::string orphan_report_to_json(const OrphanReport& r) {
    nlohmann::ordered_json j{{"orphan_members", r.orphan_members},
                             {"orphan_partners", r.orphan_partners},
                             {"projects_without_members", r.projects_without_members},
                             {"orphan_outcomes", r.orphan_outcomes},
                             {"orphan_affiliations", r.orphan_affiliations},
                             {"dangling_references", r.dangling_references}};
    return j.dump(2) + "\n";
}

std::vector<linking::ProjectRef> project_refs(const Store& store) {
    std::map<std::string, std::string> pi_surname;
    for (const auto& [id, m] : store.members()) {
        const std::string role = text::to_lower_ascii(m.role);
        if (role != "pi" && role != "principal_investigator" && role != "principal investigator") continue;
        const auto p = store.persons().find(m.person_id);
        if (p != store.persons().end()) pi_surname.emplace(m.project_id, p->second.surname);
    }
    std::vector<linking::ProjectRef> out;
    for (const auto& [id, p] : store.projects()) {
        linking::ProjectRef r;
        r.project_id = id;
        r.grant_reference = p.grant_reference;
        r.title = p.title;
        if (p.lead_organisation_id) {
            const auto o = store.organisations().find(*p.lead_organisation_id);
            if (o != store.organisations().end()) r.lead_organisation = o->second.name;
        }
        if (const auto s = pi_surname.find(id); s != pi_surname.end()) r.pi_surname = s->second;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<linking::PersonCandidate> person_candidates(const Store& store) {
    std::set<std::string> members;
    for (const auto& [id, m] : store.members()) members.insert(m.person_id);
    std::vector<linking::PersonCandidate> out;
    for (const auto& [id, p] : store.persons()) {
        linking::PersonCandidate c;
        c.person_id = id;
        c.surname = p.surname;
        c.first_name = p.first_name;
        for (const auto& org : p.organisation_ids) {
            const auto o = store.organisations().find(org);
            if (o == store.organisations().end()) continue;
            c.organisations.push_back(o->second.name);
            c.organisations.insert(c.organisations.end(), o->second.variant_names.begin(),
                                   o->second.variant_names.end());
        }
        c.has_membership = members.count(id) > 0;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace gtrx::store
