#include "webnav/dom.hpp"
#include "webnav/errors.hpp"
#include "webnav/text.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>

namespace webnav {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

bool one_of(std::string_view tag, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

bool is_void(std::string_view tag) {
    return one_of(tag, {"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
                        "param", "source", "track", "wbr", "keygen"});
}

// Start tags that implicitly close an open <p>.
bool closes_paragraph(std::string_view tag) {
    return one_of(tag, {"address", "article", "aside", "blockquote", "center", "details", "dialog",
                        "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer", "form",
                        "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup", "hr", "li", "main",
                        "menu", "nav", "ol", "p", "pre", "section", "summary", "table", "ul", "dd",
                        "dt", "listing", "plaintext", "xmp"});
}

bool is_heading(std::string_view tag) {
    return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

// Raw text: content is skipped entirely. Escapable raw text: content is
// entity-decoded text of the element.
bool is_raw_text(std::string_view tag) {
    return one_of(tag, {"script", "style", "noscript", "xmp", "iframe", "noembed", "noframes"});
}
bool is_escapable_raw_text(std::string_view tag) { return one_of(tag, {"title", "textarea"}); }

struct NamedEntity {
    std::string_view name;
    char32_t cp;
};

constexpr std::array<NamedEntity, 38> kEntities{{
    {"amp", U'&'},     {"lt", U'<'},        {"gt", U'>'},        {"quot", U'"'},
    {"apos", U'\''},   {"nbsp", 0xA0},      {"copy", 0xA9},      {"reg", 0xAE},
    {"trade", 0x2122}, {"hellip", 0x2026},  {"mdash", 0x2014},   {"ndash", 0x2013},
    {"lsquo", 0x2018}, {"rsquo", 0x2019},   {"ldquo", 0x201C},   {"rdquo", 0x201D},
    {"laquo", 0xAB},   {"raquo", 0xBB},     {"middot", 0xB7},    {"bull", 0x2022},
    {"times", 0xD7},   {"divide", 0xF7},    {"euro", 0x20AC},    {"pound", 0xA3},
    {"yen", 0xA5},     {"cent", 0xA2},      {"sect", 0xA7},      {"para", 0xB6},
    {"deg", 0xB0},     {"plusmn", 0xB1},    {"larr", 0x2190},    {"rarr", 0x2192},
    {"uarr", 0x2191},  {"darr", 0x2193},    {"iexcl", 0xA1},     {"iquest", 0xBF},
    {"shy", 0xAD},     {"zwj", 0x200D},
}};

// Entities browsers accept without the trailing semicolon.
bool legacy_entity(std::string_view name) {
    return one_of(name, {"amp", "lt", "gt", "quot", "nbsp", "copy", "reg", "laquo", "raquo", "middot", "times",
                         "divide", "pound", "yen", "cent", "sect", "para", "deg", "plusmn", "iexcl", "iquest", "shy"});
}

std::string decode_entities(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        std::size_t j = i + 1;
        if (j < in.size() && in[j] == '#') {
            ++j;
            bool hex = j < in.size() && (in[j] == 'x' || in[j] == 'X');
            if (hex) ++j;
            std::size_t start = j;
            std::uint32_t value = 0;
            while (j < in.size() && (hex ? is_hex(in[j]) : is_digit(in[j])) && j - start < 8) {
                char c = in[j];
                int digit = is_digit(c) ? c - '0' : (c | 0x20) - 'a' + 10;
                value = value * (hex ? 16 : 10) + static_cast<std::uint32_t>(digit);
                ++j;
            }
            if (j == start) {
                out.push_back(in[i++]);
                continue;
            }
            if (j < in.size() && in[j] == ';') ++j;
            append_utf8(out, value == 0 ? 0xFFFD : static_cast<char32_t>(value));
            i = j;
            continue;
        }
        std::size_t start = j;
        while (j < in.size() && (is_alpha(in[j]) || is_digit(in[j])) && j - start < 10) ++j;
        std::string_view name = in.substr(start, j - start);
        bool semicolon = j < in.size() && in[j] == ';';
        auto it = std::find_if(kEntities.begin(), kEntities.end(),
                               [&](const NamedEntity& e) { return e.name == name; });
        if (it != kEntities.end() && (semicolon || legacy_entity(name))) {
            append_utf8(out, it->cp);
            i = semicolon ? j + 1 : j;
        } else {
            out.push_back(in[i++]);
        }
    }
    return out;
}

struct Token {
    enum Kind { Text, StartTag, EndTag } kind = Text;
    std::string name;
    std::string data;
    std::vector<Attribute> attributes;
    bool self_closing = false;
};

class Tokenizer {
public:
    explicit Tokenizer(std::string_view in) : in_(in) {}

    // Returns false at end of input.
    bool next(Token& tok) {
        while (pos_ < in_.size()) {
            if (!raw_tag_.empty()) return raw_text(tok);
            if (in_[pos_] != '<') return text(tok);
            if (starts_with("<!--")) {
                skip_comment();
                continue;
            }
            char c = peek(1);
            if (c == '!' || c == '?') {
                skip_to_gt(pos_ + 2);
                continue;
            }
            if (c == '/' && is_alpha(peek(2))) {
                if (end_tag(tok)) return true;
                continue;
            }
            if (c == '/') {  // `</>` or `</ junk>`: bogus comment
                skip_to_gt(pos_ + 2);
                continue;
            }
            if (is_alpha(c)) {
                if (start_tag(tok)) return true;
                continue;
            }
            return text(tok);
        }
        return false;
    }

private:
    char peek(std::size_t off) const { return pos_ + off < in_.size() ? in_[pos_ + off] : '\0'; }
    bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

    void skip_comment() {
        std::size_t end = in_.find("-->", pos_ + 4);
        pos_ = end == std::string_view::npos ? in_.size() : end + 3;
    }

    void skip_to_gt(std::size_t from) {
        std::size_t end = in_.find('>', std::min(from, in_.size()));
        pos_ = end == std::string_view::npos ? in_.size() : end + 1;
    }

    bool text(Token& tok) {
        // A '<' that does not start markup is literal text.
        std::size_t end = pos_ + 1;
        while (end < in_.size()) {
            if (in_[end] == '<') {
                char c = end + 1 < in_.size() ? in_[end + 1] : '\0';
                if (is_alpha(c) || c == '/' || c == '!' || c == '?') break;
            }
            ++end;
        }
        tok = Token{};
        tok.kind = Token::Text;
        tok.data = decode_entities(in_.substr(pos_, end - pos_));
        pos_ = end;
        return true;
    }

    std::string read_name() {
        std::size_t start = pos_;
        while (pos_ < in_.size() && !is_ascii_space(in_[pos_]) && in_[pos_] != '/' && in_[pos_] != '>')
            ++pos_;
        return ascii_lower(in_.substr(start, pos_ - start));
    }

    void skip_space() {
        while (pos_ < in_.size() && is_ascii_space(in_[pos_])) ++pos_;
    }

    bool start_tag(Token& tok) {
        ++pos_;
        Token t;
        t.kind = Token::StartTag;
        t.name = read_name();
        while (true) {
            skip_space();
            if (pos_ >= in_.size()) {  // EOF inside a tag: drop the tag
                pos_ = in_.size();
                return false;
            }
            char c = in_[pos_];
            if (c == '>') {
                ++pos_;
                break;
            }
            if (c == '/') {
                ++pos_;
                if (pos_ < in_.size() && in_[pos_] == '>') {
                    t.self_closing = true;
                    ++pos_;
                    break;
                }
                continue;
            }
            std::size_t name_start = pos_;
            ++pos_;  // an attribute name may begin with '='
            while (pos_ < in_.size() && !is_ascii_space(in_[pos_]) && in_[pos_] != '/' &&
                   in_[pos_] != '>' && in_[pos_] != '=')
                ++pos_;
            std::string name = ascii_lower(in_.substr(name_start, pos_ - name_start));
            std::string value;
            skip_space();
            if (pos_ < in_.size() && in_[pos_] == '=') {
                ++pos_;
                skip_space();
                if (pos_ < in_.size() && (in_[pos_] == '"' || in_[pos_] == '\'')) {
                    char quote = in_[pos_++];
                    std::size_t end = in_.find(quote, pos_);
                    if (end == std::string_view::npos) {
                        pos_ = in_.size();
                        return false;
                    }
                    value = decode_entities(in_.substr(pos_, end - pos_));
                    pos_ = end + 1;
                } else {
                    std::size_t start = pos_;
                    while (pos_ < in_.size() && !is_ascii_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
                    value = decode_entities(in_.substr(start, pos_ - start));
                }
            }
            bool duplicate = std::any_of(t.attributes.begin(), t.attributes.end(),
                                         [&](const Attribute& a) { return a.first == name; });
            if (!duplicate) t.attributes.emplace_back(std::move(name), std::move(value));
        }
        if (is_raw_text(t.name) || is_escapable_raw_text(t.name)) raw_tag_ = t.name;
        tok = std::move(t);
        return true;
    }

    bool end_tag(Token& tok) {
        pos_ += 2;
        Token t;
        t.kind = Token::EndTag;
        t.name = read_name();
        skip_to_gt(pos_);
        tok = std::move(t);
        return true;
    }

    // Content of script/style/title/textarea up to the matching end tag.
    bool raw_text(Token& tok) {
        std::string tag = std::move(raw_tag_);
        raw_tag_.clear();
        std::size_t search = pos_;
        std::size_t end = in_.size();
        while (true) {
            std::size_t lt = in_.find("</", search);
            if (lt == std::string_view::npos) break;
            std::string_view candidate = in_.substr(lt + 2, tag.size());
            char after = lt + 2 + tag.size() < in_.size() ? in_[lt + 2 + tag.size()] : '>';
            if (ascii_lower(candidate) == tag &&
                (after == '>' || after == '/' || is_ascii_space(after))) {
                end = lt;
                break;
            }
            search = lt + 2;
        }
        std::string_view content = in_.substr(pos_, end - pos_);
        pos_ = end;
        tok = Token{};
        tok.kind = Token::Text;
        tok.data = is_escapable_raw_text(tag) ? decode_entities(content) : std::string{};
        return true;
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    std::string raw_tag_;
};

// Mutable node used during construction.
struct BuildNode {
    std::string tag;
    std::vector<Attribute> attributes;
    std::string text;
    std::vector<int> children;
};

class TreeBuilder {
public:
    // Deeper elements are attached as siblings, as browsers do.
    static constexpr std::size_t kMaxDepth = 512;

    TreeBuilder() {
        nodes_.push_back(BuildNode{"html", {}, {}, {}});
        stack_.push_back(0);
    }

    void feed(Token& tok) {
        switch (tok.kind) {
            case Token::Text: text(tok.data); break;
            case Token::StartTag: start(tok); break;
            case Token::EndTag: end(tok.name); break;
        }
    }

    DomTree finish() {
        DomTree tree;
        tree.root = materialize(0);
        if (title_) tree.title = normalize_whitespace(*title_);
        renumber(tree);
        return tree;
    }

private:
    const std::string& current_tag() const { return nodes_[static_cast<std::size_t>(stack_.back())].tag; }

    void text(const std::string& data) {
        if (stack_.size() > 1 && current_tag() == "title" && !title_) title_ = data;
        std::string& target = nodes_[static_cast<std::size_t>(stack_.back())].text;
        target.push_back(' ');
        target += data;
    }

    bool in_foreign() const {
        return std::any_of(stack_.begin(), stack_.end(), [&](int id) {
            const std::string& t = nodes_[static_cast<std::size_t>(id)].tag;
            return t == "svg" || t == "math";
        });
    }

    // Searches the open-element stack from the top for any tag in `targets`,
    // giving up at any tag in `barriers`. Returns the stack depth or -1.
    int find_open(std::initializer_list<std::string_view> targets,
                  std::initializer_list<std::string_view> barriers) const {
        for (int i = static_cast<int>(stack_.size()) - 1; i > 0; --i) {
            const std::string& t = nodes_[static_cast<std::size_t>(stack_[static_cast<std::size_t>(i)])].tag;
            if (one_of(t, targets)) return i;
            if (one_of(t, barriers)) return -1;
        }
        return -1;
    }

    void pop_to(int depth) {
        if (depth > 0) stack_.resize(static_cast<std::size_t>(depth));
    }

    void close_implied(const std::string& tag) {
        if (closes_paragraph(tag))
            pop_to(find_open({"p"}, {"table", "td", "th", "caption", "marquee", "object", "applet", "button",
                                     "template"}));
        if (is_heading(tag) && is_heading(current_tag())) stack_.pop_back();
        if (tag == "li") pop_to(find_open({"li"}, {"ul", "ol", "menu", "table", "td", "th"}));
        if (tag == "dt" || tag == "dd") pop_to(find_open({"dt", "dd"}, {"dl", "table", "td", "th"}));
        if (tag == "option" && current_tag() == "option") stack_.pop_back();
        if (tag == "optgroup") {
            if (current_tag() == "option") stack_.pop_back();
            if (current_tag() == "optgroup") stack_.pop_back();
        }
        if (tag == "tr") pop_to(find_open({"tr"}, {"table"}));
        if (tag == "td" || tag == "th") pop_to(find_open({"td", "th"}, {"tr", "table"}));
        if (tag == "thead" || tag == "tbody" || tag == "tfoot")
            pop_to(find_open({"thead", "tbody", "tfoot"}, {"table"}));
        if (tag == "a") pop_to(find_open({"a"}, {"table", "td", "th", "button"}));
        if (tag == "button") pop_to(find_open({"button"}, {}));
        if (tag == "select") pop_to(find_open({"select"}, {"table"}));
    }

    void start(Token& tok) {
        if (tok.name == "html") {
            auto& root = nodes_[0].attributes;
            for (auto& attr : tok.attributes) {
                bool present = std::any_of(root.begin(), root.end(),
                                           [&](const Attribute& a) { return a.first == attr.first; });
                if (!present) root.push_back(std::move(attr));
            }
            return;
        }
        if (!in_foreign()) close_implied(tok.name);
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(BuildNode{tok.name, std::move(tok.attributes), {}, {}});
        nodes_[static_cast<std::size_t>(stack_.back())].children.push_back(id);
        const auto& tag = nodes_.back().tag;
        bool leaf = is_void(tag) || (tok.self_closing && (in_foreign() || tag == "svg" || tag == "math"));
        // Raw-text elements emit exactly one text token, so they stay open
        // until their end tag like any other element.
        if (!leaf && stack_.size() < kMaxDepth) stack_.push_back(id);
    }

    void end(const std::string& tag) {
        if (tag == "html" || tag == "body") return;  // closed at end of input
        for (int i = static_cast<int>(stack_.size()) - 1; i > 0; --i) {
            if (nodes_[static_cast<std::size_t>(stack_[static_cast<std::size_t>(i)])].tag == tag) {
                pop_to(i);
                return;
            }
        }
    }

    DomNode materialize(int id) const {
        const BuildNode& b = nodes_[static_cast<std::size_t>(id)];
        DomNode n;
        n.tag = b.tag;
        n.attributes = b.attributes;
        if (!is_raw_text(b.tag)) n.text = normalize_whitespace(b.text);
        n.children.reserve(b.children.size());
        for (int child : b.children) n.children.push_back(materialize(child));
        return n;
    }

    std::vector<BuildNode> nodes_;
    std::vector<int> stack_;
    std::optional<std::string> title_;
};

}  // namespace

DomTree parse_html(std::string_view text) {
    if (text.empty()) throw EmptyDocument("input contains no bytes");
    Tokenizer tokenizer(text);
    TreeBuilder builder;
    Token tok;
    while (tokenizer.next(tok)) builder.feed(tok);
    return builder.finish();
}

}  // namespace webnav
