#include "gtrx/doctree.hpp"

#include <algorithm>

#include "gtrx/errors.hpp"
#include "gtrx/html_dom.hpp"

namespace gtrx::doctree {

namespace {

using html::Node;

bool is_accordion_section(const Node& n) {
    if (!n.is_element()) return false;
    if (n.is("details")) return true;
    const std::string* cls = n.attribute("class");
    if (!cls) return false;
    for (const auto& token : text::split_words(*cls)) {
        if (token.ends_with("accordion__section") || token == "accordion-section") return true;
    }
    return false;
}

bool is_block_container(const Node& n) {
    static constexpr std::string_view kBlocks[] = {
        "p", "div", "section", "article", "main", "header", "footer", "aside", "nav",
        "blockquote", "pre", "figure", "figcaption", "form", "fieldset", "address", "body",
        "html", "li", "dd", "dt", "tr", "td", "th", "tbody", "thead", "tfoot", "caption", "hr",
        "center", "summary", "details", "#document"};
    return std::find(std::begin(kBlocks), std::end(kBlocks), n.tag) != std::end(kBlocks);
}

std::string strip_label(std::string label) {
    label = text::normalize_space(label);
    while (!label.empty() && (label.back() == ':' || label.back() == ' ')) label.pop_back();
    return label;
}

/// Text of a list item excluding nested lists, which are returned separately.
void list_items(const Node& list, std::vector<std::string>& out);

void item_text(const Node& n, std::string& buf, std::vector<const Node*>& nested) {
    if (n.is_text()) {
        buf += n.text;
        return;
    }
    if (n.is("ul") || n.is("ol")) {
        nested.push_back(&n);
        return;
    }
    if (n.is("br")) buf.push_back(' ');
    for (const auto& c : n.children) item_text(c, buf, nested);
    if (is_block_container(n) || html::heading_rank(n) > 0) buf.push_back(' ');
}

void collect_li(const Node& n, std::vector<std::string>& out) {
    for (const auto& c : n.children) {
        if (c.is("li")) {
            std::string buf;
            std::vector<const Node*> nested;
            for (const auto& cc : c.children) item_text(cc, buf, nested);
            std::string t = text::normalize_space(buf);
            if (!t.empty()) out.push_back(std::move(t));
            for (const Node* sub : nested) list_items(*sub, out);
        } else if (c.is_element() && !c.is("ul") && !c.is("ol")) {
            collect_li(c, out);
        } else if (c.is("ul") || c.is("ol")) {
            list_items(c, out);
        } else if (c.is_text()) {
            std::string t = text::normalize_space(c.text);
            if (!t.empty()) out.push_back(std::move(t));
        }
    }
}

void list_items(const Node& list, std::vector<std::string>& out) { collect_li(list, out); }

void collect_rows(const Node& n, std::vector<std::vector<std::string>>& rows) {
    for (const auto& c : n.children) {
        if (c.is("tr")) {
            std::vector<std::string> cells;
            for (const auto& cell : c.children) {
                if (cell.is("td") || cell.is("th")) {
                    std::string t = html::text_content(cell);
                    if (!t.empty()) cells.push_back(std::move(t));
                } else if (cell.is_text()) {
                    std::string t = text::normalize_space(cell.text);
                    if (!t.empty()) cells.push_back(std::move(t));
                }
            }
            if (!cells.empty()) rows.push_back(std::move(cells));
        } else if (c.is_element() && !c.is("table")) {
            collect_rows(c, rows);
        }
    }
}

class TreeBuilder {
public:
    explicit TreeBuilder(OpportunityDoc& doc) : doc_(doc) { stack_.push_back(&doc_.root); }

    void walk(const Node& n) {
        if (n.is_text()) {
            inline_ += n.text;
            return;
        }
        if (n.attribute("hidden") || n.is("head") || n.is("nav") || n.is("footer")) return;
        // site chrome; a header that carries the page title is kept
        if (n.is("header") && !html::find_first(n, [](const Node& e) { return e.is("h1"); })) return;
        if (n.is("br")) {
            inline_.push_back(' ');
            return;
        }
        if (n.is("title")) return;
        if (const int rank = html::heading_rank(n); rank > 0) {
            heading(rank, html::text_content(n));
            return;
        }
        if (n.is("summary") && pending_section_) {
            heading(2, html::text_content(n));
            return;
        }
        if (is_accordion_section(n)) {
            section(n);
            return;
        }
        if (n.is("ul") || n.is("ol")) {
            flush();
            std::vector<std::string> items;
            list_items(n, items);
            if (!items.empty()) top().blocks.push_back(Block::list(std::move(items)));
            return;
        }
        if (n.is("dl")) {
            definition_list(n);
            return;
        }
        if (n.is("table")) {
            table(n);
            return;
        }
        const bool block = is_block_container(n);
        if (block) flush();
        for (const auto& c : n.children) walk(c);
        if (block) flush();
    }

    void finish() { flush(); }

private:
    DocNode& top() { return *stack_.back(); }

    bool at_root_context() const { return stack_.size() == 1 && !in_section_; }

    void flush() {
        std::string t = text::normalize_space(inline_);
        inline_.clear();
        if (!t.empty()) top().blocks.push_back(Block::paragraph(std::move(t)));
    }

    void open_node(int level, std::string heading) {
        while (stack_.size() > 1 && stack_.back()->level >= level) stack_.pop_back();
        DocNode child;
        child.heading = std::move(heading);
        child.level = level;
        DocNode& parent = top();
        parent.children.push_back(std::move(child));
        stack_.push_back(&parent.children.back());
    }

    void heading(int rank, std::string heading_text) {
        flush();
        if (rank == 1 && !title_set_ && !in_section_) {
            doc_.title = heading_text;
            doc_.root.heading = std::move(heading_text);
            title_set_ = true;
            return;
        }
        if (pending_section_) {
            stack_[section_depth_]->heading = std::move(heading_text);
            pending_section_ = false;
            return;
        }
        int level = std::max(rank, 2);
        if (in_section_) level = std::max(level, 3);
        open_node(level, std::move(heading_text));
    }

    void section(const Node& n) {
        flush();
        const bool nested = in_section_;
        if (nested) {
            // accordion inside an accordion: treat as a plain container
            for (const auto& c : n.children) walk(c);
            flush();
            return;
        }
        stack_.resize(1);
        open_node(2, "");
        in_section_ = true;
        pending_section_ = true;
        section_depth_ = stack_.size() - 1;
        for (const auto& c : n.children) walk(c);
        flush();
        in_section_ = false;
        pending_section_ = false;
        stack_.resize(1);
    }

    void definition_list(const Node& n) {
        flush();
        std::vector<std::pair<std::string, std::string>> pairs;
        std::function<void(const Node&)> scan = [&](const Node& e) {
            for (const auto& c : e.children) {
                if (c.is("dt")) {
                    pairs.emplace_back(strip_label(html::text_content(c)), "");
                } else if (c.is("dd")) {
                    std::string v = html::text_content(c);
                    if (pairs.empty()) pairs.emplace_back("", "");
                    auto& slot = pairs.back().second;
                    if (!slot.empty() && !v.empty()) slot += "; ";
                    slot += v;
                } else if (c.is_element()) {
                    scan(c);
                }
            }
        };
        scan(n);
        const bool summary = at_root_context();
        for (auto& [label, value] : pairs) {
            std::string line = label.empty() ? value : (value.empty() ? label : label + ": " + value);
            if (!line.empty()) top().blocks.push_back(Block::paragraph(std::move(line)));
            if (summary && !label.empty()) doc_.summary_fields.emplace(label, value);
        }
    }

    void table(const Node& n) {
        flush();
        std::vector<std::vector<std::string>> rows;
        collect_rows(n, rows);
        const bool summary = at_root_context() && n.class_contains("summary");
        for (auto& cells : rows) {
            if (summary && cells.size() == 2) doc_.summary_fields.emplace(strip_label(cells[0]), cells[1]);
            top().blocks.push_back(Block::paragraph(text::join(cells, " | ")));
        }
        if (const Node* caption = html::find_first(n, [](const Node& e) { return e.is("caption"); })) {
            std::string t = html::text_content(*caption);
            if (!t.empty()) top().blocks.push_back(Block::paragraph(std::move(t)));
        }
    }

    OpportunityDoc& doc_;
    std::vector<DocNode*> stack_;
    std::string inline_;
    bool title_set_ = false;
    bool in_section_ = false;
    bool pending_section_ = false;
    std::size_t section_depth_ = 0;
};

// --- updates -------------------------------------------------------------

bool is_updates_heading(std::string_view t) {
    const std::string l = text::to_lower_ascii(text::trim(t));
    return l == "updates" || l == "update" || l == "opportunity updates" || l == "latest updates";
}

const Node* find_updates_container(const Node& dom) {
    // explicit markup first
    if (const Node* hit = html::find_first(dom, [](const Node& n) {
            const std::string* id = n.attribute("id");
            return n.class_contains("updates") || (id && text::to_lower_ascii(*id) == "updates");
        }))
        return hit;
    // otherwise an accordion section headed "Updates"
    return html::find_first(dom, [](const Node& n) {
        if (!is_accordion_section(n)) return false;
        const Node* h = html::find_first(n, [](const Node& e) { return html::heading_rank(e) > 0 || e.is("summary"); });
        return h && is_updates_heading(html::text_content(*h));
    });
}

struct Item {
    bool heading;
    std::string text;
};

void linearize(const Node& n, std::vector<Item>& out) {
    for (const auto& c : n.children) {
        if (c.is_text()) {
            std::string t = text::normalize_space(c.text);
            if (!t.empty()) out.push_back({false, std::move(t)});
            continue;
        }
        if (html::heading_rank(c) > 0 || c.is("dt") || c.is("time") || c.is("summary") ||
            c.class_contains("date")) {
            out.push_back({true, html::text_content(c)});
            continue;
        }
        if (c.is("p") || c.is("li") || c.is("dd") || c.is("td")) {
            std::string t = html::text_content(c);
            if (!t.empty()) out.push_back({false, std::move(t)});
            continue;
        }
        linearize(c, out);
    }
}

UpdateExtraction updates_from_dom(const Node& dom) {
    UpdateExtraction result;
    const Node* container = find_updates_container(dom);
    if (!container) return result;
    std::vector<Item> items;
    linearize(*container, items);

    bool open = false;
    UpdateEntry current;
    auto close = [&] {
        if (!open) return;
        current.text = text::normalize_space(current.text);
        if (current.text.empty())
            ++result.warnings;
        else
            result.entries.push_back(current);
        open = false;
    };
    for (auto& item : items) {
        if (item.heading) {
            if (is_updates_heading(item.text)) continue;
            close();
            std::string_view t = item.text;
            if (auto colon = t.find(':'); colon != std::string_view::npos &&
                                          text::iequals(text::trim(t.substr(0, colon)), "update"))
                t = t.substr(colon + 1);
            if (auto d = Date::parse(t)) {
                current = UpdateEntry{*d, {}};
                open = true;
            } else {
                ++result.warnings;
            }
            continue;
        }
        if (open) {
            if (!current.text.empty()) current.text.push_back(' ');
            current.text += item.text;
        }
    }
    close();
    return result;
}

}  // namespace

OpportunityDoc parse_opportunity_html(std::string_view html_text, std::string opportunity_id) {
    if (opportunity_id.empty()) throw InvalidInput("opportunity_id must be non-empty");
    const Node dom = html::parse(html_text);

    OpportunityDoc doc;
    doc.opportunity_id = std::move(opportunity_id);
    doc.root.level = 1;

    TreeBuilder builder(doc);
    builder.walk(dom);
    builder.finish();

    if (doc.title.empty()) {
        if (const Node* t = html::find_first(dom, [](const Node& n) { return n.is("title"); }))
            doc.title = html::text_content(*t);
        doc.root.heading = doc.title;
    }
    if (doc.title.empty() && doc.root.blocks.empty() && doc.root.children.empty())
        throw MalformedDocument("no recognizable content in document '" + doc.opportunity_id + "'");
    if (doc.root.heading.empty()) doc.root.heading = doc.opportunity_id;

    doc.updates = updates_from_dom(dom).entries;
    return doc;
}

UpdateExtraction extract_updates(std::string_view html_text) {
    return updates_from_dom(html::parse(html_text));
}

void visit(const DocNode& root, const std::function<void(const DocNode&, const NodePath&)>& fn) {
    NodePath path;
    std::function<void(const DocNode&)> rec = [&](const DocNode& n) {
        fn(n, path);
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            path.push_back(i);
            rec(n.children[i]);
            path.pop_back();
        }
    };
    rec(root);
}

const DocNode* node_at(const DocNode& root, const NodePath& path) {
    const DocNode* cur = &root;
    for (std::size_t idx : path) {
        if (idx >= cur->children.size()) return nullptr;
        cur = &cur->children[idx];
    }
    return cur;
}

std::size_t node_count(const DocNode& root) {
    std::size_t n = 1;
    for (const auto& c : root.children) n += node_count(c);
    return n;
}

bool is_valid(const DocNode& root) {
    if (root.level < 1) return false;
    for (const auto& b : root.blocks) {
        if (b.kind == Block::Kind::Paragraph && text::normalize_space(b.text).empty()) return false;
        if (b.kind == Block::Kind::List && b.items.empty()) return false;
    }
    for (const auto& c : root.children) {
        if (c.level <= root.level || !is_valid(c)) return false;
    }
    return true;
}

}  // namespace gtrx::doctree
