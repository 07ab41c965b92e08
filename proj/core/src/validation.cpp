#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "gtrx/linking.hpp"

namespace gtrx::linking {

namespace {

bool present(const std::optional<std::string>& s) { return s && !text::trim(*s).empty(); }

bool surnames_agree(const std::string& a, const std::string& b) {
    const std::string x = normalize_for_matching(a);
    const std::string y = normalize_for_matching(b);
    return x.find(y) != std::string::npos || y.find(x) != std::string::npos;
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
    return buf;
}

}  // namespace

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 0.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ValidationReport validate_links(const std::vector<LinkedPairEvidence>& pairs, const LinkingThresholds& t) {
    ValidationReport r;
    std::vector<double> title_sims;
    for (const auto& p : pairs) {
        if (present(p.organisation_a) && present(p.organisation_b)) {
            ++r.organisation.n;
            if (fuzzy_ratio(*p.organisation_a, *p.organisation_b) >= t.cluster_org_min_similarity - kScoreTolerance)
                ++r.organisation.agree;
        }
        if (present(p.surname_a) && present(p.surname_b)) {
            ++r.surname.n;
            if (surnames_agree(*p.surname_a, *p.surname_b)) ++r.surname.agree;
        }
        if (present(p.title_a) && present(p.title_b)) {
            const double sim = fuzzy_ratio(*p.title_a, *p.title_b);
            title_sims.push_back(sim);
            ++r.title.n;
            if (sim >= t.title_agreement_min - kScoreTolerance) ++r.title.agree;
        }
    }
    if (!title_sims.empty()) {
        double sum = 0.0;
        for (double s : title_sims) sum += s;
        r.title_mean = sum / static_cast<double>(title_sims.size());
        std::sort(title_sims.begin(), title_sims.end());
        const std::size_t mid = title_sims.size() / 2;
        r.title_median = title_sims.size() % 2 ? title_sims[mid] : (title_sims[mid - 1] + title_sims[mid]) / 2.0;
    }
    r.pooled.n = r.organisation.n + r.surname.n + r.title.n;
    r.pooled.agree = r.organisation.agree + r.surname.agree + r.title.agree;
    std::tie(r.ci_low, r.ci_high) = wilson_interval(r.pooled.agree, r.pooled.n);
    return r;
}

std::string render_validation(const ValidationReport& r) {
    std::string out;
    auto line = [&](const char* name, const Agreement& a) {
        out += std::string(name) + ": " + std::to_string(a.agree) + "/" + std::to_string(a.n) + " (" +
               pct(a.rate()) + ")\n";
    };
    line("organisation agreement", r.organisation);
    line("surname agreement", r.surname);
    line("title agreement", r.title);
    char buf[96];
    std::snprintf(buf, sizeof buf, "title similarity: mean %.3f, median %.3f\n", r.title_mean, r.title_median);
    out += buf;
    line("pooled precision", r.pooled);
    out += "95% Wilson interval: [" + pct(r.ci_low) + ", " + pct(r.ci_high) + "]\n";
    return out;
}

std::string validation_to_json(const ValidationReport& r) {
    auto agreement = [](const Agreement& a) {
        return nlohmann::ordered_json{{"n", a.n}, {"agree", a.agree}, {"rate", a.rate()}};
    };
    nlohmann::ordered_json j{{"organisation", agreement(r.organisation)},
                             {"surname", agreement(r.surname)},
                             {"title", agreement(r.title)},
                             {"title_mean", r.title_mean},
                             {"title_median", r.title_median},
                             {"pooled", agreement(r.pooled)},
                             {"ci_low", r.ci_low},
                             {"ci_high", r.ci_high}};
    return j.dump(2) + "\n";
}

}  // namespace gtrx::linking
