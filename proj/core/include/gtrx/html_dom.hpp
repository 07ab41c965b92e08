#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gtrx::html {

/// Minimal DOM produced by the lenient parser. Element names are lowercased;
/// text nodes carry entity-decoded character data.
struct Node {
    enum class Type { Element, Text };

    Type type = Type::Element;
    std::string tag;  // element name, empty for text
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;  // text nodes only
    std::vector<Node> children;

    bool is_element() const { return type == Type::Element; }
    bool is_text() const { return type == Type::Text; }
    bool is(std::string_view name) const { return is_element() && tag == name; }

    const std::string* attribute(std::string_view name) const;
    /// True when the class attribute contains a token that includes `fragment`.
    bool class_contains(std::string_view fragment) const;
};

/// Parses arbitrary (possibly broken) HTML into a tree rooted at a synthetic
/// "#document" element. Never throws on malformed markup. Script, style, and
/// template contents are discarded.
Node parse(std::string_view html);

std::string decode_entities(std::string_view s);

/// Concatenated descendant text with whitespace normalized.
std::string text_content(const Node& node);

/// Heading rank for h1..h6, 0 otherwise.
int heading_rank(const Node& node);

/// Depth-first search for the first element satisfying `pred`.
template <typename Pred>
const Node* find_first(const Node& node, Pred&& pred) {
    if (node.is_element() && pred(node)) return &node;
    for (const auto& c : node.children)
        if (const Node* hit = find_first(c, pred)) return hit;
    return nullptr;
}

}  // namespace gtrx::html
