#include <charconv>

#include <json.hpp>

#include "gtrx/csv.hpp"
#include "gtrx/errors.hpp"
#include "gtrx/linking.hpp"

namespace gtrx::linking {

namespace {

using json = nlohmann::json;

/// One input row, whichever the source format. CSV cells arrive as strings;
/// an empty cell means absent.
class Row {
public:
    Row(json j, std::string where) : j_(std::move(j)), where_(std::move(where)) {}

    std::optional<std::string> opt(const char* key) const {
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return std::nullopt;
        if (it->is_string()) {
            std::string s = text::trim(it->get<std::string>());
            return s.empty() ? std::nullopt : std::optional(s);
        }
        if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
        fail(key, "must be a string");
    }

    std::string req(const char* key) const {
        auto v = opt(key);
        if (!v) fail(key, "is required");
        return *v;
    }

    std::optional<std::int64_t> money(const char* key) const {
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return std::nullopt;
        if (it->is_number_integer()) {
            const auto v = it->get<std::int64_t>();
            if (v < 0) fail(key, "must be non-negative");
            return v;
        }
        const auto s = opt(key);
        if (!s) return std::nullopt;
        std::string digits;
        for (char c : *s)
            if (c != ',') digits.push_back(c);
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || p != digits.data() + digits.size() || v < 0) fail(key, "must be a whole amount");
        return v;
    }

    std::optional<Date> date(const char* key) const {
        const auto s = opt(key);
        if (!s) return std::nullopt;
        auto d = Date::parse(*s);
        if (!d) fail(key, "is not a date");
        return d;
    }

    std::vector<std::string> list(const char* key) const {
        std::vector<std::string> out;
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return out;
        if (it->is_array()) {
            for (const auto& e : *it) {
                if (!e.is_string()) fail(key, "must hold strings");
                out.push_back(text::trim(e.get<std::string>()));
            }
            return out;
        }
        // CSV cells separate entries with ';'
        const auto s = opt(key);
        if (!s) return out;
        std::size_t start = 0;
        while (start <= s->size()) {
            const auto end = std::min(s->find(';', start), s->size());
            std::string part = text::trim(std::string_view(*s).substr(start, end - start));
            if (!part.empty()) out.push_back(std::move(part));
            start = end + 1;
        }
        return out;
    }

private:
    [[noreturn]] void fail(const char* key, const char* what) const {
        throw InvalidInput(where_ + ": field '" + key + "' " + what);
    }

    json j_;
    std::string where_;
};

std::vector<Row> rows_of(std::string_view content, bool csv_format) {
    std::vector<Row> rows;
    if (csv_format) {
        std::size_t n = 1;
        for (auto& rec : csv::parse_records(content)) {
            json j = json::object();
            for (auto& [k, v] : rec) j[text::trim(k)] = v;
            rows.emplace_back(std::move(j), "row " + std::to_string(++n));
        }
        return rows;
    }
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        const auto end = std::min(content.find('\n', start), content.size());
        const std::string line = text::trim(content.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InvalidInput("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object()) throw InvalidInput("line " + std::to_string(line_no) + ": expected an object");
        rows.emplace_back(std::move(j), "line " + std::to_string(line_no));
    }
    return rows;
}

}  // namespace

std::vector<ApplicationRecord> read_applications(std::string_view content, bool csv_format) {
    std::vector<ApplicationRecord> out;
    for (const auto& r : rows_of(content, csv_format)) {
        ApplicationRecord a;
        a.record_id = r.req("record_id");
        a.council = r.req("council");
        a.application_id = r.opt("application_id");
        a.award_id = r.opt("award_id");
        a.title = r.opt("title");
        a.pi_surname = r.opt("pi_surname");
        a.organisation = r.opt("organisation");
        a.opportunity_name = r.opt("opportunity_name");
        a.meeting_ref = r.req("meeting_ref");
        a.route = r.opt("route");
        a.total_awarded = r.money("total_awarded");
        a.outcome_status = r.opt("outcome_status").value_or("");
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<MeetingRecord> read_meetings(std::string_view content, bool csv_format) {
    std::vector<MeetingRecord> out;
    for (const auto& r : rows_of(content, csv_format)) {
        MeetingRecord m;
        m.meeting_id = r.req("meeting_id");
        m.council = r.req("council");
        m.name = r.req("name");
        const auto d = r.date("date");
        if (!d) throw InvalidInput("meeting '" + m.meeting_id + "': field 'date' is required");
        m.date = *d;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<OpportunityCandidate> read_opportunities(std::string_view content, bool csv_format) {
    std::vector<OpportunityCandidate> out;
    for (const auto& r : rows_of(content, csv_format)) {
        OpportunityCandidate o;
        o.opportunity_id = r.req("opportunity_id");
        o.title = r.req("title");
        o.funders = r.list("funders");
        o.opening_date = r.date("opening_date");
        o.closing_date = r.date("closing_date");
        o.funding_type = r.opt("funding_type");
        o.award_min = r.money("award_min");
        o.award_max = r.money("award_max");
        if (o.award_min && o.award_max && *o.award_min > *o.award_max)
            throw InvalidInput("opportunity '" + o.opportunity_id + "': award_min exceeds award_max");
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<PanelAppearanceRecord> read_appearances(std::string_view content, bool csv_format) {
    std::vector<PanelAppearanceRecord> out;
    for (const auto& r : rows_of(content, csv_format)) {
        PanelAppearanceRecord p;
        p.appearance_id = r.req("appearance_id");
        p.council = r.req("council");
        p.surname = r.req("surname");
        p.first_name_or_initial = r.req("first_name_or_initial");
        p.organisation = r.opt("organisation");
        p.meeting_ref = r.req("meeting_ref");
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace gtrx::linking
