#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gtrx/fuzzy.hpp"
#include "gtrx/text.hpp"

namespace gtrx::linking {

/// Every decision threshold used by the linkers. Defaults are the published
/// values; all of them can be overridden from a config file.
struct LinkingThresholds {
    double opportunity_min_score = 0.65;
    double route_boost = 0.1;
    double award_penalty = 0.15;
    double cluster_org_min_similarity = 0.7;
    double align_min_similarity = 0.6;
    double align_min_margin = 0.15;
    /// Title similarity at or above which a validated pair counts as agreeing.
    double title_agreement_min = 0.9;
};

/// Absorbs floating-point noise in threshold comparisons (e.g. 0.7 + 0.1 - 0.15).
inline constexpr double kScoreTolerance = 1e-9;

/// Merges keys from a JSON object over `base`; unknown keys throw ConfigError.
LinkingThresholds thresholds_from_json(std::string_view json, LinkingThresholds base = {});
std::string thresholds_to_json(const LinkingThresholds& t);

// --- records -------------------------------------------------------------------

struct ApplicationRecord {
    std::string record_id;
    std::string council;
    std::optional<std::string> application_id;
    std::optional<std::string> award_id;
    std::optional<std::string> title;
    std::optional<std::string> pi_surname;
    std::optional<std::string> organisation;
    std::optional<std::string> opportunity_name;
    std::string meeting_ref;
    std::optional<std::string> route;
    std::optional<std::int64_t> total_awarded;
    std::string outcome_status;
};

struct MeetingRecord {
    std::string meeting_id;
    std::string council;
    std::string name;
    Date date;
};

struct OpportunityCandidate {
    std::string opportunity_id;
    std::string title;
    std::vector<std::string> funders;
    std::optional<Date> opening_date;
    std::optional<Date> closing_date;
    std::optional<std::string> funding_type;
    std::optional<std::int64_t> award_min;
    std::optional<std::int64_t> award_max;
};

struct PanelAppearanceRecord {
    std::string appearance_id;
    std::string council;
    std::string surname;
    std::string first_name_or_initial;
    std::optional<std::string> organisation;
    std::string meeting_ref;
};

/// Project fields needed for exact linking and cross-validation.
struct ProjectRef {
    std::string project_id;
    std::string grant_reference;
    std::optional<std::string> title;
    std::optional<std::string> lead_organisation;
    std::optional<std::string> pi_surname;
};

/// A GtR person eligible for attendance alignment.
struct PersonCandidate {
    std::string person_id;
    std::string surname;
    std::string first_name;
    std::vector<std::string> organisations;
    bool has_membership = false;
};

enum class LinkMethod { ExactGrantRef, FuzzyTitle, ClusterAlignment };
std::string_view to_string(LinkMethod m);

using DiagnosticValue = std::variant<double, std::string>;

struct LinkResult {
    std::string source_id;
    std::string target_id;
    double score = 0.0;
    LinkMethod method = LinkMethod::ExactGrantRef;
    std::map<std::string, DiagnosticValue> diagnostics;
};

std::string link_to_json(const LinkResult& link);

// --- application -> project ----------------------------------------------------

/// Lookup from trimmed, lowercased grant reference to project ids.
class ProjectIndex {
public:
    explicit ProjectIndex(const std::vector<ProjectRef>& projects);

    const std::vector<std::string>& lookup(std::string_view reference) const;
    const ProjectRef* project(std::string_view project_id) const;

    static std::string key(std::string_view reference);

private:
    std::map<std::string, std::vector<std::string>> by_reference_;
    std::map<std::string, ProjectRef> by_id_;
};

/// Exact case-insensitive match of application_id or award_id against grant
/// references. Throws AmbiguousMatch when more than one project matches.
std::optional<LinkResult> link_application_project(const ApplicationRecord& app, const ProjectIndex& projects);

// --- application -> opportunity --------------------------------------------------

struct OpportunityScore {
    double base = 0.0;
    double boost = 0.0;
    double penalty = 0.0;
    double score = 0.0;  // clamped to [0,1]
};

OpportunityScore score_opportunity_candidate(double base, bool route_match, bool amount_outside,
                                             const LinkingThresholds& t = {});

/// True when an amount is known and falls outside whichever bounds exist.
bool amount_outside_range(std::optional<std::int64_t> amount, std::optional<std::int64_t> min,
                          std::optional<std::int64_t> max);

bool accepts_opportunity_score(double score, const LinkingThresholds& t = {});

/// Council-funder agreement and meeting date on/after the opening date filter
/// candidates; the best-scoring survivor is linked when it clears the
/// threshold. Throws UnresolvedMeeting for a dangling meeting_ref.
std::optional<LinkResult> link_application_opportunity(const ApplicationRecord& app,
                                                       const std::map<std::string, MeetingRecord>& meetings,
                                                       const std::vector<OpportunityCandidate>& opportunities,
                                                       const LinkingThresholds& t = {});

// --- panel attendance -> person --------------------------------------------------

struct AttendanceCluster {
    std::string cluster_id;
    std::string council;  // lowercased
    std::string surname;  // lowercased
    char initial = '?';
    std::optional<std::string> first_name;  // full first name, lowercased
    std::optional<std::string> organisation;  // most frequent organisation
    std::vector<std::string> appearance_ids;  // sorted

    bool operator==(const AttendanceCluster&) const = default;
};

/// Organisation similarity gate used for splitting; a missing organisation on
/// either side never splits.
bool organisations_compatible(const std::optional<std::string>& a, const std::optional<std::string>& b,
                              const LinkingThresholds& t = {});

/// Groups records per council by (surname, first initial), splitting on
/// conflicting full first names or low organisation similarity. The result is
/// independent of input order.
std::vector<AttendanceCluster> cluster_panel_attendance(const std::vector<PanelAppearanceRecord>& records,
                                                        const LinkingThresholds& t = {});

/// Index of the winner when best > align_min_similarity and the margin over
/// the runner-up is at least align_min_margin.
std::optional<std::size_t> choose_by_margin(const std::vector<double>& similarities,
                                            const LinkingThresholds& t = {});

/// Aligns a cluster to a person with project memberships: a unique
/// surname-initial candidate links directly, several need a clear
/// organisation winner.
std::optional<LinkResult> align_cluster_person(const AttendanceCluster& cluster,
                                               const std::vector<PersonCandidate>& persons,
                                               const LinkingThresholds& t = {});

// --- cross-validation --------------------------------------------------------------

struct LinkedPairEvidence {
    std::optional<std::string> organisation_a, organisation_b;
    std::optional<std::string> surname_a, surname_b;
    std::optional<std::string> title_a, title_b;
};

struct Agreement {
    std::size_t n = 0;
    std::size_t agree = 0;
    double rate() const { return n ? static_cast<double>(agree) / static_cast<double>(n) : 0.0; }
};

struct ValidationReport {
    Agreement organisation;
    Agreement surname;
    Agreement title;  // similarity >= title_agreement_min
    double title_mean = 0.0;
    double title_median = 0.0;
    Agreement pooled;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

ValidationReport validate_links(const std::vector<LinkedPairEvidence>& pairs, const LinkingThresholds& t = {});

std::string render_validation(const ValidationReport& report);
std::string validation_to_json(const ValidationReport& report);

// --- record readers (JSON lines or CSV, chosen by the caller) ----------------------

std::vector<ApplicationRecord> read_applications(std::string_view content, bool csv);
std::vector<MeetingRecord> read_meetings(std::string_view content, bool csv);
std::vector<OpportunityCandidate> read_opportunities(std::string_view content, bool csv);
std::vector<PanelAppearanceRecord> read_appearances(std::string_view content, bool csv);

}  // namespace gtrx::linking
