#include "gtrx/linking.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "gtrx/errors.hpp"

namespace gtrx::linking {

namespace {

std::string norm(std::string_view s) { return normalize_for_matching(s); }

bool present(const std::optional<std::string>& s) { return s && !text::trim(*s).empty(); }

/// Lowercased first name without dots; a single letter means initial only.
std::string clean_first_name(std::string_view s) {
    std::string out;
    for (char c : norm(s))
        if (c != '.') out.push_back(c);
    return text::trim(out);
}

char initial_of(std::string_view first) {
    for (char c : first)
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return static_cast<char>(c | 0x20);
    return '?';
}

bool funder_matches(std::string_view funder, std::string_view council) {
    const std::string f = norm(funder);
    const std::string c = norm(council);
    if (c.empty()) return false;
    return f == c || f.find("(" + c + ")") != std::string::npos;
}

}  // namespace

std::string_view to_string(LinkMethod m) {
    switch (m) {
        case LinkMethod::ExactGrantRef: return "exact_grant_ref";
        case LinkMethod::FuzzyTitle: return "fuzzy_title";
        case LinkMethod::ClusterAlignment: return "cluster_alignment";
    }
    return "exact_grant_ref";
}

LinkingThresholds thresholds_from_json(std::string_view json, LinkingThresholds base) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("linking thresholds: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("linking thresholds must be a JSON object");
    const std::map<std::string, double*> slots = {
        {"opportunity_min_score", &base.opportunity_min_score},
        {"route_boost", &base.route_boost},
        {"award_penalty", &base.award_penalty},
        {"cluster_org_min_similarity", &base.cluster_org_min_similarity},
        {"align_min_similarity", &base.align_min_similarity},
        {"align_min_margin", &base.align_min_margin},
        {"title_agreement_min", &base.title_agreement_min},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = slots.find(key);
        if (it == slots.end()) throw ConfigError("unknown linking threshold '" + key + "'");
        if (!value.is_number()) throw ConfigError("linking threshold '" + key + "' must be a number");
        *it->second = value.get<double>();
    }
    return base;
}

std::string thresholds_to_json(const LinkingThresholds& t) {
    nlohmann::ordered_json j{{"opportunity_min_score", t.opportunity_min_score},
                             {"route_boost", t.route_boost},
                             {"award_penalty", t.award_penalty},
                             {"cluster_org_min_similarity", t.cluster_org_min_similarity},
                             {"align_min_similarity", t.align_min_similarity},
                             {"align_min_margin", t.align_min_margin},
                             {"title_agreement_min", t.title_agreement_min}};
    return j.dump();
}

std::string link_to_json(const LinkResult& link) {
    nlohmann::ordered_json diag = nlohmann::ordered_json::object();
    for (const auto& [k, v] : link.diagnostics) {
        if (const auto* d = std::get_if<double>(&v))
            diag[k] = *d;
        else
            diag[k] = std::get<std::string>(v);
    }
    nlohmann::ordered_json j{{"source_id", link.source_id},
                             {"target_id", link.target_id},
                             {"score", link.score},
                             {"method", to_string(link.method)},
                             {"diagnostics", std::move(diag)}};
    return j.dump();
}

// --- application -> project ----------------------------------------------------

ProjectIndex::ProjectIndex(const std::vector<ProjectRef>& projects) {
    for (const auto& p : projects) {
        by_id_.emplace(p.project_id, p);
        const std::string k = key(p.grant_reference);
        if (k.empty()) continue;
        auto& ids = by_reference_[k];
        if (std::find(ids.begin(), ids.end(), p.project_id) == ids.end()) ids.push_back(p.project_id);
    }
}

std::string ProjectIndex::key(std::string_view reference) { return text::to_lower_ascii(text::trim(reference)); }

const std::vector<std::string>& ProjectIndex::lookup(std::string_view reference) const {
    static const std::vector<std::string> kNone;
    const auto it = by_reference_.find(key(reference));
    return it == by_reference_.end() ? kNone : it->second;
}

const ProjectRef* ProjectIndex::project(std::string_view project_id) const {
    const auto it = by_id_.find(std::string(project_id));
    return it == by_id_.end() ? nullptr : &it->second;
}

std::optional<LinkResult> link_application_project(const ApplicationRecord& app, const ProjectIndex& projects) {
    std::set<std::string> matched;
    std::vector<std::string> via;
    for (const auto& [name, id] : {std::pair{"application_id", &app.application_id}, std::pair{"award_id", &app.award_id}}) {
        if (!present(*id)) continue;
        const auto& hits = projects.lookup(**id);
        if (!hits.empty()) via.emplace_back(name);
        matched.insert(hits.begin(), hits.end());
    }
    if (matched.empty()) return std::nullopt;
    if (matched.size() > 1)
        throw AmbiguousMatch("application '" + app.record_id + "' matches projects: " +
                             text::join({matched.begin(), matched.end()}, ", "));
    LinkResult r;
    r.source_id = app.record_id;
    r.target_id = *matched.begin();
    r.score = 1.0;
    r.method = LinkMethod::ExactGrantRef;
    r.diagnostics["matched_on"] = text::join(via, "+");
    return r;
}

// --- application -> opportunity --------------------------------------------------

OpportunityScore score_opportunity_candidate(double base, bool route_match, bool amount_outside,
                                             const LinkingThresholds& t) {
    OpportunityScore s;
    s.base = base;
    s.boost = route_match ? t.route_boost : 0.0;
    s.penalty = amount_outside ? t.award_penalty : 0.0;
    s.score = std::clamp(base + s.boost - s.penalty, 0.0, 1.0);
    return s;
}

bool amount_outside_range(std::optional<std::int64_t> amount, std::optional<std::int64_t> min,
                          std::optional<std::int64_t> max) {
    if (!amount) return false;
    if (min && *amount < *min) return true;
    if (max && *amount > *max) return true;
    return false;
}

bool accepts_opportunity_score(double score, const LinkingThresholds& t) {
    return score >= t.opportunity_min_score - kScoreTolerance;
}

std::optional<LinkResult> link_application_opportunity(const ApplicationRecord& app,
                                                       const std::map<std::string, MeetingRecord>& meetings,
                                                       const std::vector<OpportunityCandidate>& opportunities,
                                                       const LinkingThresholds& t) {
    const auto m = meetings.find(app.meeting_ref);
    if (m == meetings.end())
        throw UnresolvedMeeting("application '" + app.record_id + "' references unknown meeting '" +
                                app.meeting_ref + "'");
    const MeetingRecord& meeting = m->second;
    const bool from_opportunity = present(app.opportunity_name);
    const std::string candidate_text = from_opportunity ? *app.opportunity_name : meeting.name;

    const OpportunityCandidate* best = nullptr;
    OpportunityScore best_score;
    std::size_t considered = 0;
    for (const auto& opp : opportunities) {
        const bool funder_ok = std::any_of(opp.funders.begin(), opp.funders.end(),
                                           [&](const std::string& f) { return funder_matches(f, app.council); });
        if (!funder_ok) continue;
        if (opp.opening_date && meeting.date < *opp.opening_date) continue;
        ++considered;
        const bool route_match = present(app.route) && present(opp.funding_type) &&
                                 norm(*app.route) == norm(*opp.funding_type);
        const bool outside = amount_outside_range(app.total_awarded, opp.award_min, opp.award_max);
        const OpportunityScore s =
            score_opportunity_candidate(fuzzy_ratio(candidate_text, opp.title), route_match, outside, t);
        if (!best || s.score > best_score.score ||
            (s.score == best_score.score && opp.opportunity_id < best->opportunity_id)) {
            best = &opp;
            best_score = s;
        }
    }
    if (!best || !accepts_opportunity_score(best_score.score, t)) return std::nullopt;

    LinkResult r;
    r.source_id = app.record_id;
    r.target_id = best->opportunity_id;
    r.score = best_score.score;
    r.method = LinkMethod::FuzzyTitle;
    r.diagnostics["base"] = best_score.base;
    r.diagnostics["boost"] = best_score.boost;
    r.diagnostics["penalty"] = best_score.penalty;
    r.diagnostics["candidate_text"] = candidate_text;
    r.diagnostics["candidate_source"] = std::string(from_opportunity ? "opportunity_name" : "meeting_name");
    r.diagnostics["candidates_considered"] = static_cast<double>(considered);
    return r;
}

// --- panel attendance -> person --------------------------------------------------

bool organisations_compatible(const std::optional<std::string>& a, const std::optional<std::string>& b,
                              const LinkingThresholds& t) {
    if (!present(a) || !present(b)) return true;
    return fuzzy_ratio(*a, *b) >= t.cluster_org_min_similarity - kScoreTolerance;
}

namespace {

struct SubCluster {
    std::optional<std::string> first_name;
    std::map<std::string, int> organisations;
    std::vector<std::string> members;

    std::optional<std::string> representative() const {
        std::optional<std::string> best;
        int best_count = 0;
        for (const auto& [org, count] : organisations) {  // map order gives the lexicographic tie-break
            if (count > best_count) {
                best = org;
                best_count = count;
            }
        }
        return best;
    }

    void add(const PanelAppearanceRecord& r) {
        members.push_back(r.appearance_id);
        if (present(r.organisation)) ++organisations[norm(*r.organisation)];
    }
};

struct Prepared {
    const PanelAppearanceRecord* record;
    std::string first;  // cleaned first name
    std::string org;    // normalized, empty when absent
};

}  // namespace

std::vector<AttendanceCluster> cluster_panel_attendance(const std::vector<PanelAppearanceRecord>& records,
                                                        const LinkingThresholds& t) {
    using GroupKey = std::tuple<std::string, std::string, char>;
    std::map<GroupKey, std::vector<Prepared>> groups;
    for (const auto& r : records) {
        const std::string first = clean_first_name(r.first_name_or_initial);
        groups[{norm(r.council), norm(r.surname), initial_of(first)}].push_back(
            {&r, first, present(r.organisation) ? norm(*r.organisation) : std::string{}});
    }

    std::vector<AttendanceCluster> out;
    for (auto& [key, members] : groups) {
        // canonical processing order makes the result permutation-invariant
        std::sort(members.begin(), members.end(), [](const Prepared& a, const Prepared& b) {
            const bool fa = a.first.size() > 1, fb = b.first.size() > 1;
            if (fa != fb) return fa;
            return std::tie(a.first, a.org, a.record->appearance_id) < std::tie(b.first, b.org, b.record->appearance_id);
        });

        std::vector<SubCluster> subs;
        for (const auto& p : members) {
            const std::optional<std::string> org = p.org.empty() ? std::nullopt : std::optional(p.org);
            if (p.first.size() > 1) {
                auto it = std::find_if(subs.begin(), subs.end(), [&](const SubCluster& s) {
                    return s.first_name == p.first && organisations_compatible(org, s.representative(), t);
                });
                if (it == subs.end()) {
                    subs.push_back({p.first, {}, {}});
                    it = std::prev(subs.end());
                }
                it->add(*p.record);
                continue;
            }
            // initial only: join the most organisation-similar compatible sub-cluster
            SubCluster* target = nullptr;
            if (!org) {
                if (subs.size() == 1) target = &subs.front();
            } else {
                double best = -1.0;
                for (auto& s : subs) {
                    const auto rep = s.representative();
                    if (!organisations_compatible(org, rep, t)) continue;
                    const double sim = rep ? fuzzy_ratio(*org, *rep) : 0.0;
                    if (sim > best) {
                        best = sim;
                        target = &s;
                    }
                }
            }
            if (!target) {
                subs.push_back({std::nullopt, {}, {}});
                target = &subs.back();
            }
            target->add(*p.record);
        }

        const auto& [council, surname, initial] = key;
        std::vector<AttendanceCluster> group_clusters;
        for (auto& s : subs) {
            AttendanceCluster c;
            c.council = council;
            c.surname = surname;
            c.initial = initial;
            c.first_name = s.first_name;
            c.organisation = s.representative();
            c.appearance_ids = std::move(s.members);
            std::sort(c.appearance_ids.begin(), c.appearance_ids.end());
            group_clusters.push_back(std::move(c));
        }
        std::sort(group_clusters.begin(), group_clusters.end(), [](const auto& a, const auto& b) {
            return std::tie(a.first_name, a.appearance_ids) < std::tie(b.first_name, b.appearance_ids);
        });
        for (std::size_t i = 0; i < group_clusters.size(); ++i) {
            group_clusters[i].cluster_id = council + "|" + surname + "|" + std::string(1, initial) + "|" +
                                           std::to_string(i + 1);
            out.push_back(std::move(group_clusters[i]));
        }
    }
    return out;
}

std::optional<std::size_t> choose_by_margin(const std::vector<double>& similarities, const LinkingThresholds& t) {
    if (similarities.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < similarities.size(); ++i)
        if (similarities[i] > similarities[best]) best = i;
    double second = 0.0;
    for (std::size_t i = 0; i < similarities.size(); ++i)
        if (i != best) second = std::max(second, similarities[i]);
    const double top = similarities[best];
    if (!(top > t.align_min_similarity + kScoreTolerance)) return std::nullopt;
    if (top - second < t.align_min_margin - kScoreTolerance) return std::nullopt;
    return best;
}

std::optional<LinkResult> align_cluster_person(const AttendanceCluster& cluster,
                                               const std::vector<PersonCandidate>& persons,
                                               const LinkingThresholds& t) {
    std::vector<const PersonCandidate*> candidates;
    for (const auto& p : persons) {
        if (!p.has_membership) continue;
        if (norm(p.surname) != cluster.surname) continue;
        if (initial_of(clean_first_name(p.first_name)) != cluster.initial) continue;
        candidates.push_back(&p);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto* a, const auto* b) { return a->person_id < b->person_id; });
    if (candidates.empty()) return std::nullopt;

    LinkResult r;
    r.source_id = cluster.cluster_id;
    r.method = LinkMethod::ClusterAlignment;
    r.diagnostics["candidates"] = static_cast<double>(candidates.size());
    if (candidates.size() == 1) {
        r.target_id = candidates.front()->person_id;
        r.score = 1.0;
        r.diagnostics["rule"] = std::string("unique_surname_initial");
        return r;
    }
    if (!cluster.organisation) return std::nullopt;

    std::vector<double> sims;
    for (const auto* p : candidates) {
        double best = 0.0;
        for (const auto& org : p->organisations) best = std::max(best, fuzzy_ratio(*cluster.organisation, org));
        sims.push_back(best);
    }
    const auto chosen = choose_by_margin(sims, t);
    if (!chosen) return std::nullopt;
    std::vector<double> sorted = sims;
    std::sort(sorted.rbegin(), sorted.rend());
    r.target_id = candidates[*chosen]->person_id;
    r.score = sims[*chosen];
    r.diagnostics["rule"] = std::string("organisation_margin");
    r.diagnostics["best_similarity"] = sorted[0];
    r.diagnostics["second_similarity"] = sorted[1];
    return r;
}

}  // namespace gtrx::linking
