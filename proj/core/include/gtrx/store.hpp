#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gtrx/linking.hpp"
#include "gtrx/text.hpp"

namespace gtrx::store {

struct FundingRecord {
    std::int64_t amount = 0;
    std::string funder;
    std::optional<Date> start;
    std::optional<Date> end;

    bool operator==(const FundingRecord&) const = default;
};

struct Project {
    std::string id;
    std::string grant_reference;
    std::string council;
    std::string title;
    std::string abstract_text;
    std::vector<FundingRecord> funding;
    std::optional<std::string> lead_organisation_id;

    bool operator==(const Project&) const = default;
};

struct Person {
    std::string id;
    std::string first_name;
    std::string surname;
    std::optional<std::string> orcid;
    std::vector<std::string> organisation_ids;

    bool operator==(const Person&) const = default;
};

struct Organisation {
    std::string id;
    std::string name;
    std::vector<std::string> variant_names;

    bool operator==(const Organisation&) const = default;
};

struct ProjectMember {
    std::string id;
    std::string project_id;
    std::string person_id;
    std::string role;

    bool operator==(const ProjectMember&) const = default;
};

struct ProjectPartner {
    std::string id;
    std::string project_id;
    std::string organisation_id;
    std::string role;

    bool operator==(const ProjectPartner&) const = default;
};

// --- outcomes: a generic base record plus one child table per kind -------------

enum class OutcomeKind {
    Publication,
    Collaboration,
    Dissemination,
    PolicyInfluence,
    IntellectualProperty,
    SpinOut,
    Other,
};

inline constexpr OutcomeKind kAllOutcomeKinds[] = {
    OutcomeKind::Publication,     OutcomeKind::Collaboration,        OutcomeKind::Dissemination,
    OutcomeKind::PolicyInfluence, OutcomeKind::IntellectualProperty, OutcomeKind::SpinOut,
    OutcomeKind::Other,
};

std::string_view to_string(OutcomeKind k);
std::optional<OutcomeKind> outcome_kind_from(std::string_view s);

enum class PayloadType { Text, Integer };

struct PayloadField {
    std::string_view name;
    PayloadType type;
    bool required;
};

/// Column layout of the child table for `kind`, in export order.
const std::vector<PayloadField>& payload_schema(OutcomeKind kind);

using PayloadValue = std::variant<std::string, std::int64_t>;

struct Outcome {
    std::string id;
    std::string project_id;
    OutcomeKind kind = OutcomeKind::Other;
    /// Only keys from payload_schema(kind); enforced on ingest.
    std::map<std::string, PayloadValue> payload;

    bool operator==(const Outcome&) const = default;
};

// --- integrity -------------------------------------------------------------------

struct DanglingRef {
    std::string source_table;
    std::string source_id;
    std::string field;
    std::string target_table;
    std::string target_id;

    auto operator<=>(const DanglingRef&) const = default;
};

struct IngestSummary {
    std::size_t records_read = 0;
    std::size_t stored = 0;
    std::size_t schema_violations = 0;
    std::vector<std::string> violations;  // "line N: message"
    std::size_t ids_reused = 0;
    std::size_t ids_derived = 0;
    // Whole-store reference accounting after this ingest.
    std::size_t references_total = 0;
    std::size_t references_resolved = 0;
    std::size_t dangling = 0;
};

struct OrphanReport {
    std::size_t orphan_members = 0;       // member records whose project or person is missing
    std::size_t orphan_partners = 0;      // partner records whose project or organisation is missing
    std::size_t orphan_outcomes = 0;      // outcomes whose project is missing
    std::size_t orphan_affiliations = 0;  // person-organisation links to a missing organisation
    std::size_t projects_without_members = 0;
    std::size_t dangling_references = 0;

    bool operator==(const OrphanReport&) const = default;
};

/// In-memory store. Ingest is single-writer; const access afterwards is safe
/// from several threads.
class Store {
public:
    /// Reads JSON lines, each an object with a "type" of project, person,
    /// organisation, project_member, project_partner or outcome. Malformed
    /// records and duplicate ids are skipped and counted; dangling references
    /// never cause a record to be dropped.
    IngestSummary ingest(std::string_view jsonl);

    const std::map<std::string, Project>& projects() const { return projects_; }
    const std::map<std::string, Person>& persons() const { return persons_; }
    const std::map<std::string, Organisation>& organisations() const { return organisations_; }
    const std::map<std::string, ProjectMember>& members() const { return members_; }
    const std::map<std::string, ProjectPartner>& partners() const { return partners_; }
    const std::map<std::string, Outcome>& outcomes() const { return outcomes_; }

    std::size_t size() const;
    std::size_t reference_count() const;

    /// Sorted by (source_table, source_id, field).
    std::vector<DanglingRef> dangling_refs() const;

private:
    std::map<std::string, Project> projects_;
    std::map<std::string, Person> persons_;
    std::map<std::string, Organisation> organisations_;
    std::map<std::string, ProjectMember> members_;
    std::map<std::string, ProjectPartner> partners_;
    std::map<std::string, Outcome> outcomes_;
};

OrphanReport orphan_report(const Store& store);
std::string render_orphan_report(const OrphanReport& report);
std::string orphan_report_to_json(const OrphanReport& report);

// --- export ------------------------------------------------------------------------

/// Entity tables written by export_store; each produces `<name>.jsonl` and `<name>.csv`.
inline constexpr std::string_view kEntityTables[] = {
    "projects", "persons", "organisations", "project_members", "project_partners", "outcomes",
};

/// CSV header of an exported table, including child and link tables such as
/// "project_funding", "person_organisations", "organisation_variant_names"
/// and "outcome_<kind>". Throws InvalidInput for an unknown table.
const std::vector<std::string>& csv_header(std::string_view table);

/// Tables whose ids are selected; empty selection means every table.
struct ExportSelection {
    std::vector<std::string> tables;
    bool includes(std::string_view table) const;
};

/// Writes JSON-lines (re-ingestable) and CSV files into `dir`, atomically per
/// file and in id order. Returns the written paths. Throws IoFailure.
std::vector<std::filesystem::path> export_store(const Store& store, const std::filesystem::path& dir,
                                                const ExportSelection& selection = {});

/// JSON line for one record, in the ingest schema.
std::string to_jsonl(const Project& p);
std::string to_jsonl(const Person& p);
std::string to_jsonl(const Organisation& o);
std::string to_jsonl(const ProjectMember& m);
std::string to_jsonl(const ProjectPartner& p);
std::string to_jsonl(const Outcome& o);

// --- views for the linkers ---------------------------------------------------------

/// Lead organisation name and PI surname resolved where the references exist.
std::vector<linking::ProjectRef> project_refs(const Store& store);

/// Persons with their affiliation names; has_membership when any member
/// record references them.
std::vector<linking::PersonCandidate> person_candidates(const Store& store);

}  // namespace gtrx::store
