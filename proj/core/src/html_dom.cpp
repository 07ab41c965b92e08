#include "gtrx/html_dom.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "gtrx/text.hpp"

namespace gtrx::html {

namespace {

constexpr std::array<std::string_view, 14> kVoid = {
    "area", "base", "br", "col", "embed", "hr", "img",
    "input", "link", "meta", "param", "source", "track", "wbr"};

// Elements whose content is dropped entirely.
constexpr std::array<std::string_view, 4> kDiscard = {"script", "style", "template", "noscript"};

// Opening any of these implicitly closes an open <p>.
constexpr std::array<std::string_view, 30> kClosesP = {
    "address", "article", "aside", "blockquote", "details", "div", "dl", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hr", "main", "nav", "ol", "p", "pre", "section", "table", "ul", "li", "summary"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == ':' || c == '_';
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

struct NamedEntity {
    std::string_view name;
    char32_t cp;
};

constexpr NamedEntity kEntities[] = {
    {"amp", U'&'},      {"lt", U'<'},       {"gt", U'>'},      {"quot", U'"'},
    {"apos", U'\''},    {"nbsp", 0xA0},     {"pound", 0xA3},   {"euro", 0x20AC},
    {"ndash", 0x2013},  {"mdash", 0x2014},  {"lsquo", 0x2018}, {"rsquo", 0x2019},
    {"ldquo", 0x201C},  {"rdquo", 0x201D},  {"hellip", 0x2026}, {"copy", 0xA9},
    {"reg", 0xAE},      {"trade", 0x2122},  {"middot", 0xB7},  {"bull", 0x2022},
    {"times", 0xD7},    {"pound", 0xA3},    {"deg", 0xB0},     {"frac12", 0xBD},
    {"shy", 0xAD},      {"ensp", 0x2002},   {"emsp", 0x2003},  {"thinsp", 0x2009},
};

class TreeBuilder {
public:
    TreeBuilder() {
        root_.tag = "#document";
        stack_.push_back(&root_);
    }

    void text(std::string data) {
        if (data.empty()) return;
        Node* top = stack_.back();
        if (!top->children.empty() && top->children.back().is_text()) {
            top->children.back().text += data;
            return;
        }
        Node n;
        n.type = Node::Type::Text;
        n.text = std::move(data);
        top->children.push_back(std::move(n));
    }

    void open(std::string tag, std::vector<std::pair<std::string, std::string>> attrs,
              bool self_closing) {
        implicit_close_for(tag);
        Node n;
        n.tag = tag;
        n.attributes = std::move(attrs);
        Node* top = stack_.back();
        top->children.push_back(std::move(n));
        if (self_closing || contains(kVoid, tag)) return;
        stack_.push_back(&top->children.back());
    }

    void close(std::string_view tag) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (stack_[i]->tag == tag) {
                stack_.resize(i);
                return;
            }
        }
    }

    Node take() { return std::move(root_); }

private:
    bool open_in_scope(std::string_view tag, std::initializer_list<std::string_view> barriers,
                       std::size_t* where) const {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            const auto& t = stack_[i]->tag;
            if (t == tag) {
                *where = i;
                return true;
            }
            if (std::find(barriers.begin(), barriers.end(), t) != barriers.end()) return false;
        }
        return false;
    }

    void close_if_open(std::string_view tag, std::initializer_list<std::string_view> barriers) {
        std::size_t at = 0;
        if (open_in_scope(tag, barriers, &at)) stack_.resize(at);
    }

    void implicit_close_for(std::string_view tag) {
        if (contains(kClosesP, tag)) close_if_open("p", {"div", "section", "li", "td", "th", "blockquote", "dd"});
        if (tag == "li") close_if_open("li", {"ul", "ol"});
        if (tag == "dt" || tag == "dd") {
            close_if_open("dt", {"dl"});
            close_if_open("dd", {"dl"});
        }
        if (tag == "tr") {
            close_if_open("td", {"table", "tr"});
            close_if_open("th", {"table", "tr"});
            close_if_open("tr", {"table"});
        }
        if (tag == "td" || tag == "th") {
            close_if_open("td", {"table", "tr"});
            close_if_open("th", {"table", "tr"});
        }
        if (tag == "tbody" || tag == "thead" || tag == "tfoot") {
            close_if_open("tr", {"table"});
            close_if_open("tbody", {"table"});
            close_if_open("thead", {"table"});
        }
    }

    Node root_;
    std::vector<Node*> stack_;
};

std::string lower(std::string_view s) { return text::to_lower_ascii(s); }

}  // namespace

const std::string* Node::attribute(std::string_view name) const {
    for (const auto& [k, v] : attributes)
        if (k == name) return &v;
    return nullptr;
}

bool Node::class_contains(std::string_view fragment) const {
    const std::string* cls = attribute("class");
    if (!cls) return false;
    for (const auto& token : text::split_words(*cls))
        if (token.find(fragment) != std::string::npos) return true;
    return false;
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        const std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        const std::string_view body = s.substr(i + 1, semi - i - 1);
        char32_t cp = 0;
        bool ok = false;
        if (!body.empty() && body[0] == '#') {
            const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
            const std::string digits(body.substr(hex ? 2 : 1));
            if (!digits.empty()) {
                char* end = nullptr;
                const unsigned long v = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
                if (end && *end == '\0' && v > 0 && v < 0x110000) {
                    cp = static_cast<char32_t>(v);
                    ok = true;
                }
            }
        } else {
            for (const auto& e : kEntities) {
                if (e.name == body) {
                    cp = e.cp;
                    ok = true;
                    break;
                }
            }
        }
        if (!ok) {
            out.push_back(s[i++]);
            continue;
        }
        if (cp != 0xAD) text::append_utf8(out, cp);
        i = semi + 1;
    }
    return out;
}

Node parse(std::string_view html) {
    TreeBuilder builder;
    std::size_t i = 0;
    const std::size_t n = html.size();
    std::string pending;

    auto flush = [&] {
        if (!pending.empty()) builder.text(decode_entities(pending));
        pending.clear();
    };

    while (i < n) {
        if (html[i] != '<') {
            pending.push_back(html[i++]);
            continue;
        }
        if (html.substr(i, 4) == "<!--") {
            flush();
            const std::size_t end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? n : end + 3;
            continue;
        }
        if (i + 1 < n && (html[i + 1] == '!' || html[i + 1] == '?')) {
            flush();
            const std::size_t end = html.find('>', i);
            i = end == std::string_view::npos ? n : end + 1;
            continue;
        }
        const bool closing = i + 1 < n && html[i + 1] == '/';
        std::size_t j = i + (closing ? 2 : 1);
        if (j >= n || !((html[j] >= 'a' && html[j] <= 'z') || (html[j] >= 'A' && html[j] <= 'Z'))) {
            pending.push_back(html[i++]);
            continue;
        }
        flush();
        std::size_t name_end = j;
        while (name_end < n && is_name_char(html[name_end])) ++name_end;
        const std::string tag = lower(html.substr(j, name_end - j));

        // attributes
        std::vector<std::pair<std::string, std::string>> attrs;
        std::size_t k = name_end;
        bool self_closing = false;
        while (k < n && html[k] != '>') {
            if (is_ws(html[k])) {
                ++k;
                continue;
            }
            if (html[k] == '/') {
                self_closing = true;
                ++k;
                continue;
            }
            std::size_t a = k;
            while (k < n && !is_ws(html[k]) && html[k] != '=' && html[k] != '>' && html[k] != '/') ++k;
            std::string key = lower(html.substr(a, k - a));
            while (k < n && is_ws(html[k])) ++k;
            std::string value;
            if (k < n && html[k] == '=') {
                ++k;
                while (k < n && is_ws(html[k])) ++k;
                if (k < n && (html[k] == '"' || html[k] == '\'')) {
                    const char q = html[k++];
                    const std::size_t close = html.find(q, k);
                    const std::size_t stop = close == std::string_view::npos ? n : close;
                    value = decode_entities(html.substr(k, stop - k));
                    k = stop == n ? n : stop + 1;
                } else {
                    std::size_t v = k;
                    while (k < n && !is_ws(html[k]) && html[k] != '>') ++k;
                    value = decode_entities(html.substr(v, k - v));
                }
            }
            if (!key.empty()) {
                self_closing = false;
                attrs.emplace_back(std::move(key), std::move(value));
            }
        }
        i = k < n ? k + 1 : n;

        if (closing) {
            builder.close(tag);
            continue;
        }

        if (contains(kDiscard, tag) || tag == "title" || tag == "textarea") {
            // raw text: consume through the matching end tag
            std::size_t end = i;
            std::size_t stop = n;
            while (end < n) {
                end = html.find("</", end);
                if (end == std::string_view::npos) break;
                if (lower(html.substr(end + 2, tag.size())) == tag) {
                    stop = end;
                    break;
                }
                end += 2;
            }
            const std::string_view raw = html.substr(i, stop - i);
            if (!contains(kDiscard, tag)) {
                builder.open(tag, std::move(attrs), false);
                builder.text(decode_entities(raw));
                builder.close(tag);
            }
            const std::size_t gt = stop == n ? n : html.find('>', stop);
            i = gt == std::string_view::npos ? n : gt + 1;
            continue;
        }
        builder.open(tag, std::move(attrs), self_closing);
    }
    flush();
    return builder.take();
}

namespace {

void collect_text(const Node& node, std::string& out) {
    if (node.is_text()) {
        out += node.text;
        return;
    }
    if (node.is("br")) {
        out.push_back(' ');
        return;
    }
    for (const auto& c : node.children) {
        collect_text(c, out);
    }
    if (node.is("p") || node.is("li") || node.is("td") || node.is("th") || node.is("div") ||
        heading_rank(node) > 0)
        out.push_back(' ');
}

}  // namespace

std::string text_content(const Node& node) {
    std::string raw;
    collect_text(node, raw);
    return text::normalize_space(raw);
}

int heading_rank(const Node& node) {
    if (!node.is_element() || node.tag.size() != 2 || node.tag[0] != 'h') return 0;
    const char d = node.tag[1];
    return (d >= '1' && d <= '6') ? d - '0' : 0;
}

}  // namespace gtrx::html
