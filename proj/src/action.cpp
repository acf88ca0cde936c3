#include "webnav/action.hpp"
#include "webnav/text.hpp"
#include "webnav/url.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <limits>

namespace webnav {

std::string_view command_name(const Command& command) {
    static constexpr std::array<std::string_view, 10> kNames = {
        "click", "hover", "select", "type_string", "scroll_page",
        "go", "jump_to", "switch_tab", "user_input", "finish"};
    return kNames[command.index()];
}

std::optional<std::string_view> target_element(const Action& action) {
    return std::visit(
        [](const auto& c) -> std::optional<std::string_view> {
            if constexpr (requires { c.element_id; }) {
                return std::string_view(c.element_id);
            } else {
                return std::nullopt;
            }
        },
        action.command);
}

std::string_view to_string(ParseDiagnostic::Kind kind) {
    switch (kind) {
        case ParseDiagnostic::Kind::UnknownFunction: return "UnknownFunction";
        case ParseDiagnostic::Kind::ArityError: return "ArityError";
        case ParseDiagnostic::Kind::TypeError: return "TypeError";
        case ParseDiagnostic::Kind::UnparsableLine: return "UnparsableLine";
        case ParseDiagnostic::Kind::MultipleCommands: return "MultipleCommands";
    }
    return "UnparsableLine";
}

std::string_view to_string(ValidationError::Kind kind) {
    switch (kind) {
        case ValidationError::Kind::UnknownElementId: return "UnknownElementId";
        case ValidationError::Kind::IllegalSelectTarget: return "IllegalSelectTarget";
        case ValidationError::Kind::UnknownOption: return "UnknownOption";
        case ValidationError::Kind::IllegalTypeTarget: return "IllegalTypeTarget";
        case ValidationError::Kind::TabIndexOutOfRange: return "TabIndexOutOfRange";
        case ValidationError::Kind::InvalidUrl: return "InvalidUrl";
    }
    return "UnknownElementId";
}

// ---------------------------------------------------------------------------
// Rendering

std::string quote_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (u < 0x20 || u == 0x7F) {
                    char buf[5];
                    std::snprintf(buf, sizeof buf, "\\x%02x", u);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
    return out;
}

namespace {

const char* py_bool(bool b) { return b ? "True" : "False"; }

}  // namespace

std::string to_command_string(const Command& command) {
    struct Render {
        std::string operator()(const cmd::Click& c) const {
            return "click(element_id=" + quote_string(c.element_id) + ")";
        }
        std::string operator()(const cmd::Hover& c) const {
            return "hover(element_id=" + quote_string(c.element_id) + ")";
        }
        std::string operator()(const cmd::Select& c) const {
            return "select(element_id=" + quote_string(c.element_id) + ", option=" + quote_string(c.option) + ")";
        }
        std::string operator()(const cmd::TypeString& c) const {
            return "type_string(element_id=" + quote_string(c.element_id) + ", content=" + quote_string(c.content) +
                   ", press_enter=" + py_bool(c.press_enter) + ")";
        }
        std::string operator()(const cmd::ScrollPage& c) const {
            return std::string("scroll_page(direction=") +
                   (c.direction == ScrollDirection::Up ? "\"up\"" : "\"down\"") + ")";
        }
        std::string operator()(const cmd::Go& c) const {
            return std::string("go(direction=") +
                   (c.direction == GoDirection::Forward ? "\"forward\"" : "\"backward\"") + ")";
        }
        std::string operator()(const cmd::JumpTo& c) const {
            return "jump_to(url=" + quote_string(c.url) + ", new_tab=" + py_bool(c.new_tab) + ")";
        }
        std::string operator()(const cmd::SwitchTab& c) const {
            return "switch_tab(tab_index=" + std::to_string(c.tab_index) + ")";
        }
        std::string operator()(const cmd::UserInput& c) const {
            return "user_input(message=" + quote_string(c.message) + ")";
        }
        std::string operator()(const cmd::Finish& c) const {
            return c.answer ? "finish(answer=" + quote_string(*c.answer) + ")" : "finish()";
        }
    };
    return std::visit(Render{}, command);
}

std::string to_command_string(const Action& action) {
    std::string out = to_command_string(action.command);
    if (action.comment) out += " # " + *action.comment;
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using Kind = ParseDiagnostic::Kind;

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool hspace(char c) { return c == ' ' || c == '\t'; }

struct Value {
    enum class Type { Str, Int, Bool, None, BigInt } type = Type::None;
    std::string str;
    std::int64_t integer = 0;
    bool boolean = false;
};

struct Arg {
    std::optional<std::string> keyword;
    Value value;
};

struct CallSyntax {
    std::vector<Arg> args;
    std::size_t end = 0;  // one past ')'
};

struct SyntaxError {
    std::size_t pos;
    std::string detail;
};

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Parses the argument list of a call whose '(' sits at `open`.
class ArgParser {
public:
    ArgParser(std::string_view text, std::size_t open) : s_(text), p_(open + 1) {}

    std::variant<CallSyntax, SyntaxError> run() {
        CallSyntax call;
        skip_ws();
        if (peek() == ')') {
            call.end = p_ + 1;
            return call;
        }
        while (true) {
            skip_ws();
            if (p_ >= s_.size()) return SyntaxError{p_, "unterminated argument list"};
            Arg arg;
            std::size_t save = p_;
            if (ident_start(peek())) {
                std::size_t b = p_;
                while (p_ < s_.size() && ident_char(s_[p_])) ++p_;
                std::string name(s_.substr(b, p_ - b));
                skip_ws();
                if (peek() == '=' && peek(1) != '=') {
                    ++p_;
                    arg.keyword = std::move(name);
                    skip_ws();
                } else {
                    p_ = save;
                }
            }
            auto value = parse_value();
            if (auto* err = std::get_if<SyntaxError>(&value)) return *err;
            arg.value = std::get<Value>(std::move(value));
            call.args.push_back(std::move(arg));
            skip_ws();
            char c = peek();
            if (c == ',') {
                ++p_;
                skip_ws();
                if (peek() == ')') {
                    call.end = p_ + 1;
                    return call;
                }
                continue;
            }
            if (c == ')') {
                call.end = p_ + 1;
                return call;
            }
            return SyntaxError{p_, "expected ',' or ')'"};
        }
    }

private:
    char peek(std::size_t off = 0) const { return p_ + off < s_.size() ? s_[p_ + off] : '\0'; }

    void skip_ws() {
        while (p_ < s_.size() && (hspace(s_[p_]) || s_[p_] == '\n' || s_[p_] == '\r')) ++p_;
    }

    std::variant<Value, SyntaxError> parse_value() {
        char c = peek();
        if (c == '"' || c == '\'') return parse_string();
        if (c == '-' || c == '+' || (c >= '0' && c <= '9')) return parse_int();
        if (ident_start(c)) {
            std::size_t b = p_;
            while (p_ < s_.size() && ident_char(s_[p_])) ++p_;
            std::string_view word = s_.substr(b, p_ - b);
            Value v;
            if (word == "True" || word == "False") {
                v.type = Value::Type::Bool;
                v.boolean = word == "True";
                return v;
            }
            if (word == "None") return v;
            return SyntaxError{b, "unsupported expression '" + std::string(word) + "'"};
        }
        return SyntaxError{p_, "expected a literal"};
    }

    std::variant<Value, SyntaxError> parse_int() {
        std::size_t b = p_;
        bool negative = false;
        if (peek() == '-' || peek() == '+') {
            negative = peek() == '-';
            ++p_;
        }
        std::size_t digits = p_;
        while (p_ < s_.size() && s_[p_] >= '0' && s_[p_] <= '9') ++p_;
        if (p_ == digits) return SyntaxError{b, "malformed integer"};
        if (ident_char(peek()) || peek() == '.') return SyntaxError{p_, "malformed integer"};
        Value v;
        v.type = Value::Type::Int;
        std::uint64_t magnitude = 0;
        auto [ptr, ec] = std::from_chars(s_.data() + digits, s_.data() + p_, magnitude);
        (void)ptr;
        constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        if (ec != std::errc{} || magnitude > kMax) {
            v.type = Value::Type::BigInt;
            v.str = std::string(s_.substr(b, p_ - b));
            return v;
        }
        v.integer = negative ? -static_cast<std::int64_t>(magnitude) : static_cast<std::int64_t>(magnitude);
        return v;
    }

    std::variant<Value, SyntaxError> parse_string() {
        std::size_t b = p_;
        char quote = s_[p_++];
        Value v;
        v.type = Value::Type::Str;
        while (true) {
            if (p_ >= s_.size()) return SyntaxError{b, "unterminated string literal"};
            char c = s_[p_++];
            if (c == quote) return v;
            if (c == '\n') return SyntaxError{b, "newline in string literal"};
            if (c != '\\') {
                v.str.push_back(c);
                continue;
            }
            if (p_ >= s_.size()) return SyntaxError{b, "unterminated string literal"};
            char e = s_[p_++];
            switch (e) {
                case '\\': v.str.push_back('\\'); break;
                case '\'': v.str.push_back('\''); break;
                case '"': v.str.push_back('"'); break;
                case 'n': v.str.push_back('\n'); break;
                case 't': v.str.push_back('\t'); break;
                case 'r': v.str.push_back('\r'); break;
                case '0': v.str.push_back('\0'); break;
                case '\n': break;  // line continuation
                case 'x':
                case 'u':
                case 'U': {
                    int width = e == 'x' ? 2 : (e == 'u' ? 4 : 8);
                    std::uint32_t cp = 0;
                    for (int i = 0; i < width; ++i) {
                        int h = hex_value(peek());
                        if (h < 0) return SyntaxError{p_, "truncated escape sequence"};
                        cp = cp * 16 + static_cast<std::uint32_t>(h);
                        ++p_;
                    }
                    if (e == 'x') {
                        v.str.push_back(static_cast<char>(cp));
                    } else {
                        append_utf8(v.str, static_cast<char32_t>(cp));
                    }
                    break;
                }
                default:
                    v.str.push_back('\\');
                    v.str.push_back(e);
            }
        }
    }

    std::string_view s_;
    std::size_t p_;
};

enum class ParamType { ElementId, Str, Bool, Int, OptStr, ScrollDir, GoDir };

struct Param {
    std::string_view name;
    ParamType type;
    bool required;
};

struct Signature {
    std::string_view name;
    std::vector<Param> params;
};

const std::vector<Signature>& signatures() {
    static const std::vector<Signature> kSigs = {
        {"click", {{"element_id", ParamType::ElementId, true}}},
        {"hover", {{"element_id", ParamType::ElementId, true}}},
        {"select", {{"element_id", ParamType::ElementId, true}, {"option", ParamType::Str, true}}},
        {"type_string",
         {{"element_id", ParamType::ElementId, true},
          {"content", ParamType::Str, true},
          {"press_enter", ParamType::Bool, false}}},
        {"scroll_page", {{"direction", ParamType::ScrollDir, true}}},
        {"go", {{"direction", ParamType::GoDir, true}}},
        {"jump_to", {{"url", ParamType::Str, true}, {"new_tab", ParamType::Bool, false}}},
        {"switch_tab", {{"tab_index", ParamType::Int, true}}},
        {"user_input", {{"message", ParamType::Str, true}}},
        {"finish", {{"answer", ParamType::OptStr, false}}},
    };
    return kSigs;
}

const Signature* find_signature(std::string_view name) {
    for (const auto& sig : signatures())
        if (sig.name == name) return &sig;
    return nullptr;
}

struct BuildError {
    Kind kind;
    std::string detail;
};

std::optional<std::string> canonical_element_id(const Value& v) {
    if (v.type == Value::Type::Int) {
        if (v.integer < 0 || v.integer > std::numeric_limits<int>::max()) return std::nullopt;
        return std::to_string(v.integer);
    }
    if (v.type != Value::Type::Str) return std::nullopt;
    std::string_view s = v.str;
    while (!s.empty() && hspace(s.front())) s.remove_prefix(1);
    while (!s.empty() && hspace(s.back())) s.remove_suffix(1);
    if (s.empty() || s.size() > 10) return std::nullopt;
    if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
    long long value = 0;
    std::from_chars(s.data(), s.data() + s.size(), value);
    if (value > std::numeric_limits<int>::max()) return std::nullopt;
    return std::to_string(value);
}

std::variant<Command, BuildError> build_command(const Signature& sig, const std::vector<Arg>& args) {
    std::vector<const Value*> bound(sig.params.size(), nullptr);
    std::size_t positional = 0;
    bool seen_keyword = false;
    for (const auto& arg : args) {
        if (!arg.keyword) {
            if (seen_keyword)
                return BuildError{Kind::ArityError, "positional argument follows keyword argument"};
            if (positional >= sig.params.size())
                return BuildError{Kind::ArityError, std::string(sig.name) + "() takes " +
                                                        std::to_string(sig.params.size()) + " argument(s)"};
            bound[positional++] = &arg.value;
            continue;
        }
        seen_keyword = true;
        auto it = std::find_if(sig.params.begin(), sig.params.end(),
                               [&](const Param& p) { return p.name == *arg.keyword; });
        if (it == sig.params.end())
            return BuildError{Kind::ArityError, "unexpected keyword argument '" + *arg.keyword + "'"};
        auto slot = static_cast<std::size_t>(it - sig.params.begin());
        if (bound[slot]) return BuildError{Kind::ArityError, "multiple values for argument '" + *arg.keyword + "'"};
        bound[slot] = &arg.value;
    }
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        if (!bound[i] && sig.params[i].required)
            return BuildError{Kind::ArityError, "missing required argument '" + std::string(sig.params[i].name) + "'"};
    }

    std::vector<std::string> strs(sig.params.size());
    std::vector<bool> bools(sig.params.size(), false);
    std::vector<std::optional<std::string>> opts(sig.params.size());
    std::int64_t integer = 0;
    bool direction_up = false;

    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        const Param& p = sig.params[i];
        const Value* v = bound[i];
        if (!v) continue;
        auto type_error = [&](std::string_view expected) {
            return BuildError{Kind::TypeError, std::string(p.name) + " must be " + std::string(expected)};
        };
        switch (p.type) {
            case ParamType::ElementId: {
                auto id = canonical_element_id(*v);
                if (!id) return type_error("a decimal element id string");
                strs[i] = *id;
                break;
            }
            case ParamType::Str:
                if (v->type != Value::Type::Str) return type_error("a string");
                strs[i] = v->str;
                break;
            case ParamType::OptStr:
                if (v->type == Value::Type::Str) {
                    opts[i] = v->str;
                } else if (v->type != Value::Type::None) {
                    return type_error("a string or None");
                }
                break;
            case ParamType::Bool:
                if (v->type != Value::Type::Bool) return type_error("True or False");
                bools[i] = v->boolean;
                break;
            case ParamType::Int:
                if (v->type != Value::Type::Int) return type_error("an integer");
                integer = v->integer;
                break;
            case ParamType::ScrollDir:
                if (v->type != Value::Type::Str || (v->str != "up" && v->str != "down"))
                    return type_error("'up' or 'down'");
                direction_up = v->str == "up";
                break;
            case ParamType::GoDir:
                if (v->type != Value::Type::Str || (v->str != "forward" && v->str != "backward"))
                    return type_error("'forward' or 'backward'");
                direction_up = v->str == "forward";
                break;
        }
    }

    std::string_view n = sig.name;
    if (n == "click") return cmd::Click{strs[0]};
    if (n == "hover") return cmd::Hover{strs[0]};
    if (n == "select") return cmd::Select{strs[0], strs[1]};
    if (n == "type_string") return cmd::TypeString{strs[0], strs[1], bools[2]};
    if (n == "scroll_page") return cmd::ScrollPage{direction_up ? ScrollDirection::Up : ScrollDirection::Down};
    if (n == "go") return cmd::Go{direction_up ? GoDirection::Forward : GoDirection::Backward};
    if (n == "jump_to") return cmd::JumpTo{strs[0], bools[1]};
    if (n == "switch_tab") return cmd::SwitchTab{integer};
    if (n == "user_input") return cmd::UserInput{strs[0]};
    return cmd::Finish{opts[0]};
}

struct Candidate {
    std::size_t begin;  // start of the function name
    std::size_t open;   // position of '('
    std::string_view name;
};

// Next `identifier (` occurrence at or after `from`.
std::optional<Candidate> next_candidate(std::string_view s, std::size_t from) {
    std::size_t i = from;
    while (i < s.size()) {
        if (!ident_start(s[i]) || (i > 0 && ident_char(s[i - 1]))) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (i < s.size() && ident_char(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && hspace(s[j])) ++j;
        if (j < s.size() && s[j] == '(') return Candidate{b, j, s.substr(b, i - b)};
    }
    return std::nullopt;
}

struct Found {
    Command command;
    std::size_t begin;
    std::size_t end;
};

// Scans for the first well-formed call to a known function. Diagnostics for
// malformed candidates are reported through `first_diag`.
std::optional<Found> find_command(std::string_view s, std::size_t from, std::optional<ParseDiagnostic>& known_diag,
                                  std::optional<ParseDiagnostic>& unknown_diag) {
    std::size_t pos = from;
    while (auto cand = next_candidate(s, pos)) {
        const Signature* sig = find_signature(cand->name);
        auto syntax = ArgParser(s, cand->open).run();
        if (auto* err = std::get_if<SyntaxError>(&syntax)) {
            if (sig && !known_diag) {
                std::size_t end = std::max(std::min(err->pos + 1, s.size()), cand->open + 1);
                known_diag = ParseDiagnostic{Kind::UnparsableLine, cand->begin, end,
                                             std::string(cand->name) + ": " + err->detail};
            }
            pos = cand->open + 1;
            continue;
        }
        const auto& call = std::get<CallSyntax>(syntax);
        if (!sig) {
            if (!unknown_diag)
                unknown_diag = ParseDiagnostic{Kind::UnknownFunction, cand->begin, call.end,
                                               "unknown function '" + std::string(cand->name) + "'"};
            pos = cand->open + 1;
            continue;
        }
        auto built = build_command(*sig, call.args);
        if (auto* bad = std::get_if<BuildError>(&built)) {
            if (!known_diag) known_diag = ParseDiagnostic{bad->kind, cand->begin, call.end, bad->detail};
            pos = cand->open + 1;
            continue;
        }
        return Found{std::get<Command>(std::move(built)), cand->begin, call.end};
    }
    return std::nullopt;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

ParseResult parse_action(std::string_view text) {
    std::optional<ParseDiagnostic> known_diag;
    std::optional<ParseDiagnostic> unknown_diag;
    auto found = find_command(text, 0, known_diag, unknown_diag);
    if (!found) {
        if (known_diag) return *known_diag;
        if (unknown_diag) return *unknown_diag;
        return ParseDiagnostic{Kind::UnparsableLine, 0, text.size(), "no command found"};
    }

    Action action{std::move(found->command), std::nullopt};

    // Rest of the command's line: an optional `# comment`.
    std::size_t line_end = text.find('\n', found->end);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view tail = text.substr(found->end, line_end - found->end);
    std::size_t k = 0;
    while (k < tail.size() && hspace(tail[k])) ++k;
    std::size_t rest_from = found->end;
    if (k < tail.size() && tail[k] == '#') {
        std::string_view comment = trim(tail.substr(k + 1));
        if (!comment.empty()) action.comment = std::string(comment);
        rest_from = line_end;
    }

    std::optional<ParseDiagnostic> ignored_known;
    std::optional<ParseDiagnostic> ignored_unknown;
    if (auto second = find_command(text, rest_from, ignored_known, ignored_unknown)) {
        return ParseDiagnostic{Kind::MultipleCommands, second->begin, second->end,
                               "more than one command in the output"};
    }
    return action;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void collect_options(const DomNode& node, std::vector<const DomNode*>& out) {
    for (const auto& child : node.children) {
        if (child.tag == "option") out.push_back(&child);
        collect_options(child, out);
    }
}

}  // namespace

std::vector<ValidationError> validate(const Action& action, const PageState& state,
                                      const std::map<int, int>& id_map) {
    using VK = ValidationError::Kind;
    std::vector<ValidationError> errors;

    const DomNode* target = nullptr;
    if (auto id = target_element(action)) {
        int value = -1;
        auto [ptr, ec] = std::from_chars(id->data(), id->data() + id->size(), value);
        bool numeric = ec == std::errc{} && ptr == id->data() + id->size();
        auto it = numeric ? id_map.find(value) : id_map.end();
        if (it != id_map.end()) target = find_node(state.tree, it->second);
        if (!target) {
            errors.push_back({VK::UnknownElementId, "no element with id " + std::string(*id)});
        }
    }

    if (const auto* sel = action.get<cmd::Select>(); sel && target) {
        if (target->tag != "select") {
            errors.push_back({VK::IllegalSelectTarget, "select target is <" + target->tag + ">"});
        } else {
            std::vector<const DomNode*> options;
            collect_options(*target, options);
            std::string wanted = normalize_for_match(sel->option);
            bool match = std::any_of(options.begin(), options.end(), [&](const DomNode* o) {
                const std::string* value = o->attribute("value");
                return (value && normalize_for_match(*value) == wanted) || normalize_for_match(o->text) == wanted;
            });
            if (!match) errors.push_back({VK::UnknownOption, "no option matching '" + sel->option + "'"});
        }
    }
    if (action.is<cmd::TypeString>() && target && target->tag != "input" && target->tag != "textarea") {
        errors.push_back({VK::IllegalTypeTarget, "type_string target is <" + target->tag + ">"});
    }
    if (const auto* sw = action.get<cmd::SwitchTab>()) {
        if (sw->tab_index < 0 || sw->tab_index >= static_cast<std::int64_t>(state.tabs.size()))
            errors.push_back({VK::TabIndexOutOfRange, "tab " + std::to_string(sw->tab_index) + " of " +
                                                          std::to_string(state.tabs.size())});
    }
    if (const auto* jump = action.get<cmd::JumpTo>(); jump && !is_valid_url(jump->url)) {
        errors.push_back({VK::InvalidUrl, "cannot parse url '" + jump->url + "'"});
    }
    return errors;
}

}  // namespace webnav
