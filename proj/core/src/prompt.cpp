#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/extraction.hpp"

namespace gtrx::extraction {

namespace {

constexpr std::string_view kSystemPrompt =
    "You extract metadata from UKRI funding opportunity documents.\n"
    "\n"
    "You will be given a document and a set of questions. Extract the answer strictly from the "
    "provided text. If the information is not explicitly stated, respond with null.\n"
    "\n"
    "Rules:\n"
    "- Only use information explicitly stated in the document.\n"
    "- Monetary values should be the nearest integer pounds without currency symbols or commas.\n"
    "- Percentages should be the nearest integer without the % symbol.\n"
    "- Durations should be quoted using the unit they appear with in the text. Duration strings may "
    "be rewritten to make sense (e.g. \"36 months\", \"3 years\").\n"
    "\n"
    "Respond with a JSON object only: {\"<key>\": \"plain-text answer\"} or {\"<key>\": null} if "
    "unknown. No other text.";

/// End of the balanced {...} starting at `open`, honouring JSON strings.
std::size_t object_end(std::string_view s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}' && --depth == 0)
            return i + 1;
    }
    return std::string_view::npos;
}

}  // namespace

std::string_view system_prompt() { return kSystemPrompt; }

Prompt build_prompt(std::string_view context, std::string_view question) {
    Prompt p;
    p.system = std::string(kSystemPrompt);
    p.user.reserve(context.size() + question.size() + 32);
    p.user += "## CONTEXT\n";
    p.user += context;
    p.user += "\n\n## QUESTION\n";
    p.user += question;
    return p;
}

std::optional<std::string> parse_answer(std::string_view response, std::string_view expected_key) {
    for (std::size_t open = response.find('{'); open != std::string_view::npos;
         open = response.find('{', open + 1)) {
        const std::size_t end = object_end(response, open);
        if (end == std::string_view::npos) break;
        nlohmann::json obj = nlohmann::json::parse(response.substr(open, end - open), nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) continue;
        const auto it = obj.find(std::string(expected_key));
        if (it == obj.end()) continue;
        if (it->is_null()) return std::nullopt;
        if (it->is_string()) {
            const auto value = it->get<std::string>();
            if (text::iequals(text::trim(value), "null")) return std::nullopt;
            return value;
        }
        return it->dump();
    }
    throw MalformedResponse("no JSON object with key '" + std::string(expected_key) + "' in response");
}

}  // namespace gtrx::extraction
