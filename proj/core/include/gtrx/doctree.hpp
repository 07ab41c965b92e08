#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gtrx/text.hpp"

namespace gtrx::doctree {

struct Block {
    enum class Kind { Paragraph, List };

    Kind kind = Kind::Paragraph;
    std::string text;                // paragraph
    std::vector<std::string> items;  // list

    static Block paragraph(std::string t) { return {Kind::Paragraph, std::move(t), {}}; }
    static Block list(std::vector<std::string> it) { return {Kind::List, {}, std::move(it)}; }

    bool operator==(const Block&) const = default;
};

struct DocNode {
    std::string heading;
    int level = 1;
    std::vector<Block> blocks;
    std::vector<DocNode> children;

    bool operator==(const DocNode&) const = default;
};

struct UpdateEntry {
    Date date;
    std::string text;

    bool operator==(const UpdateEntry&) const = default;
};

struct UpdateExtraction {
    std::vector<UpdateEntry> entries;
    int warnings = 0;  // skipped entries (unparseable date or empty text)
};

struct OpportunityDoc {
    std::string opportunity_id;
    std::string title;
    std::map<std::string, std::string> summary_fields;
    DocNode root;
    std::vector<UpdateEntry> updates;

    bool operator==(const OpportunityDoc&) const = default;
};

/// Path of child indices from the root; empty addresses the root.
using NodePath = std::vector<std::size_t>;

/// Builds the opportunity tree. The first <h1> (or <title>) becomes the root
/// heading; accordion sections and any heading outside them start level-2
/// nodes; deeper headings nest by rank. Throws MalformedDocument when the page
/// has neither a title nor any body text.
OpportunityDoc parse_opportunity_html(std::string_view html, std::string opportunity_id);

/// Date/text pairs from the page's updates section, in source order.
UpdateExtraction extract_updates(std::string_view html);

/// "#"*level + " " + heading, then blocks and children separated by blank lines.
std::string serialize_markdown(const DocNode& node);

/// Chunk text for a node; identical to serialize_markdown(node).
std::string node_text(const DocNode& node);

/// Inverse of serialize_markdown. Throws MalformedDocument when the text does
/// not start with a heading or a heading does not nest under the root.
DocNode parse_markdown(std::string_view markdown);

/// Visits every node depth-first (pre-order) with its path.
void visit(const DocNode& root,
           const std::function<void(const DocNode&, const NodePath&)>& fn);

/// Returns nullptr when the path does not resolve.
const DocNode* node_at(const DocNode& root, const NodePath& path);

std::size_t node_count(const DocNode& root);

/// Structural check: child levels strictly exceed parent levels, paragraphs
/// non-empty, lists non-empty.
bool is_valid(const DocNode& root);

std::string to_json(const OpportunityDoc& doc);
/// Throws InvalidInput on schema errors.
OpportunityDoc from_json(std::string_view json);

}  // namespace gtrx::doctree
