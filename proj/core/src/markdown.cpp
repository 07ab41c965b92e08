#include <string>

#include "gtrx/doctree.hpp"
#include "gtrx/errors.hpp"

namespace gtrx::doctree {

namespace {

bool needs_escape(std::string_view t) {
    return !t.empty() && (t[0] == '#' || t[0] == '\\' || t.starts_with("- "));
}

void render(const DocNode& node, std::string& out) {
    if (!out.empty()) out += "\n\n";
    out.append(static_cast<std::size_t>(node.level), '#');
    out.push_back(' ');
    out += node.heading;
    for (const auto& b : node.blocks) {
        out += "\n\n";
        if (b.kind == Block::Kind::Paragraph) {
            if (needs_escape(b.text)) out.push_back('\\');
            out += b.text;
        } else {
            for (std::size_t i = 0; i < b.items.size(); ++i) {
                if (i) out.push_back('\n');
                out += "- ";
                out += b.items[i];
            }
        }
    }
    for (const auto& c : node.children) render(c, out);
}

std::vector<std::string_view> split_paragraphs(std::string_view md) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= md.size()) {
        const std::size_t sep = md.find("\n\n", start);
        if (sep == std::string_view::npos) {
            out.push_back(md.substr(start));
            break;
        }
        out.push_back(md.substr(start, sep - start));
        start = sep + 2;
    }
    return out;
}

int heading_level(std::string_view chunk) {
    std::size_t n = 0;
    while (n < chunk.size() && chunk[n] == '#') ++n;
    if (n == 0 || n >= chunk.size() || chunk[n] != ' ') return 0;
    if (chunk.find('\n') != std::string_view::npos) return 0;
    return static_cast<int>(n);
}

bool is_list(std::string_view chunk) {
    std::size_t pos = 0;
    while (pos < chunk.size()) {
        std::size_t eol = chunk.find('\n', pos);
        if (eol == std::string_view::npos) eol = chunk.size();
        if (!chunk.substr(pos, eol - pos).starts_with("- ")) return false;
        pos = eol + 1;
    }
    return !chunk.empty();
}

}  // namespace

std::string serialize_markdown(const DocNode& node) {
    std::string out;
    render(node, out);
    return out;
}

std::string node_text(const DocNode& node) { return serialize_markdown(node); }

DocNode parse_markdown(std::string_view markdown) {
    const auto chunks = split_paragraphs(markdown);
    if (chunks.empty() || heading_level(chunks.front()) == 0)
        throw MalformedDocument("markdown must start with a heading");

    DocNode root;
    root.level = heading_level(chunks.front());
    root.heading = std::string(chunks.front().substr(static_cast<std::size_t>(root.level) + 1));
    std::vector<DocNode*> stack{&root};

    for (std::size_t i = 1; i < chunks.size(); ++i) {
        const std::string_view chunk = chunks[i];
        if (const int level = heading_level(chunk); level > 0) {
            while (!stack.empty() && stack.back()->level >= level) stack.pop_back();
            if (stack.empty())
                throw MalformedDocument("heading '" + std::string(chunk) + "' does not nest under the root");
            DocNode child;
            child.level = level;
            child.heading = std::string(chunk.substr(static_cast<std::size_t>(level) + 1));
            stack.back()->children.push_back(std::move(child));
            stack.push_back(&stack.back()->children.back());
        } else if (is_list(chunk)) {
            std::vector<std::string> items;
            std::size_t pos = 0;
            while (pos < chunk.size()) {
                std::size_t eol = chunk.find('\n', pos);
                if (eol == std::string_view::npos) eol = chunk.size();
                items.emplace_back(chunk.substr(pos + 2, eol - pos - 2));
                pos = eol + 1;
            }
            stack.back()->blocks.push_back(Block::list(std::move(items)));
        } else {
            std::string_view t = chunk;
            if (t.starts_with('\\')) t.remove_prefix(1);
            stack.back()->blocks.push_back(Block::paragraph(std::string(t)));
        }
    }
    return root;
}

}  // namespace gtrx::doctree
