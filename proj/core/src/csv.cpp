#include "gtrx/csv.hpp"

#include "gtrx/errors.hpp"

namespace gtrx::csv {

std::vector<std::vector<std::string>> parse(std::string_view content) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_has_content = false;
    std::size_t i = 0;
    auto end_row = [&] {
        if (row_has_content || !row.empty()) {
            row.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        row_has_content = false;
    };
    while (i < content.size()) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                quoted = false;
            } else {
                field.push_back(c);
            }
            ++i;
            continue;
        }
        if (c == '"') {
            quoted = true;
            row_has_content = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            row_has_content = true;
        } else if (c == '\n' || c == '\r') {
            end_row();
            if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
        } else {
            field.push_back(c);
            row_has_content = true;
        }
        ++i;
    }
    if (quoted) throw InvalidInput("csv: unterminated quoted field");
    end_row();
    return rows;
}

std::vector<std::map<std::string, std::string>> parse_records(std::string_view content) {
    auto rows = parse(content);
    std::vector<std::map<std::string, std::string>> out;
    if (rows.empty()) return out;
    const auto header = rows.front();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() > header.size())
            throw InvalidInput("csv: row " + std::to_string(r + 1) + " has more cells than the header");
        std::map<std::string, std::string> rec;
        for (std::size_t c = 0; c < header.size(); ++c) rec[header[c]] = c < rows[r].size() ? rows[r][c] : "";
        out.push_back(std::move(rec));
    }
    return out;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    out += "\n";
    return out;
}

}  // namespace gtrx::csv
