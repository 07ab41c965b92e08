#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gtrx::csv {

/// RFC 4180 parsing: quoted fields, doubled quotes, CRLF or LF line ends.
/// Blank lines are skipped. Throws InvalidInput on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view content);

/// Rows keyed by the header line. Missing trailing cells become empty strings;
/// extra cells throw InvalidInput.
std::vector<std::map<std::string, std::string>> parse_records(std::string_view content);

std::string escape(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

}  // namespace gtrx::csv
