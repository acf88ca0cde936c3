#include "webnav/trace.hpp"
#include "webnav/errors.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace webnav {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Language lang) {
    switch (lang) {
        case Language::En: return "en";
        case Language::Zh: return "zh";
        case Language::Other: return "other";
    }
    return "other";
}

Language parse_language(std::string_view s) {
    if (s == "en") return Language::En;
    if (s == "zh") return Language::Zh;
    if (s == "other") return Language::Other;
    throw SchemaError("unknown language tag '" + std::string(s) + "'");
}

Language detect_language(std::string_view task) {
    for (std::size_t i = 0; i < task.size(); ++i) {
        auto b0 = static_cast<unsigned char>(task[i]);
        if ((b0 & 0xF0) != 0xE0 || i + 2 >= task.size()) continue;
        auto b1 = static_cast<unsigned char>(task[i + 1]);
        auto b2 = static_cast<unsigned char>(task[i + 2]);
        if ((b1 & 0xC0) != 0x80 || (b2 & 0xC0) != 0x80) continue;
        char32_t cp = ((b0 & 0x0Fu) << 12) | ((b1 & 0x3Fu) << 6) | (b2 & 0x3Fu);
        if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF)) return Language::Zh;
    }
    return Language::En;
}

std::string_view to_string(Outcome::Kind kind) {
    switch (kind) {
        case Outcome::Kind::Finished: return "finished";
        case Outcome::Kind::StepCap: return "step_cap";
        case Outcome::Kind::UserAbort: return "user_abort";
        case Outcome::Kind::Error: return "error";
    }
    return "error";
}

void check_trace(const Trace& trace) {
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
        if (trace.steps[i].step_index != static_cast<int>(i))
            throw SchemaError("step " + std::to_string(i) + " has index " + std::to_string(trace.steps[i].step_index));
    bool last_finish = !trace.steps.empty() && trace.steps.back().action.is<cmd::Finish>();
    bool finished = trace.outcome.kind == Outcome::Kind::Finished;
    if (last_finish != finished) throw SchemaError("outcome 'finished' must coincide with a final finish() step");
}

std::vector<Action> action_sequence(const Trace& trace) {
    std::vector<Action> out;
    out.reserve(trace.steps.size());
    for (const auto& s : trace.steps) out.push_back(s.action);
    return out;
}

namespace {

ojson step_to_json(const TraceStep& s, const TraceWriteOptions& options) {
    ojson j;
    j["index"] = s.step_index;
    j["url"] = s.url;
    j["scroll_y"] = s.scroll_y;
    j["viewport_height"] = s.viewport_height;
    j["page_height"] = s.page_height;
    ojson tabs = ojson::array();
    for (const auto& t : s.tabs) tabs.push_back({{"title", t.title}, {"url", t.url}, {"current", t.is_current}});
    j["tabs"] = std::move(tabs);
    j["simplified_html"] = s.observation.simplified_html.text;
    ojson ids = ojson::object();
    for (const auto& [id, node] : s.observation.simplified_html.id_map) ids[std::to_string(id)] = node;
    j["id_map"] = std::move(ids);
    j["previous_commands"] = s.observation.previous_commands;
    j["action"] = to_command_string(s.action);
    j["raw_completion"] = s.raw_completion;
    if (s.intent) j["intent"] = *s.intent;
    if (s.user_response) j["user_response"] = *s.user_response;
    if (options.timestamps && s.timestamp_ms) j["timestamp"] = *s.timestamp_ms;
    return j;
}

template <class T>
T field(const ojson& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw SchemaError(std::string("missing field '") + name + "'");
    try {
        return it->template get<T>();
    } catch (const nlohmann::json::exception&) {
        throw SchemaError(std::string("field '") + name + "' has the wrong type");
    }
}

template <class T>
std::optional<T> optional_field(const ojson& j, const char* name) {
    if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
    return field<T>(j, name);
}

TraceStep step_from_json(const ojson& j, const std::string& task) {
    if (!j.is_object()) throw SchemaError("step is not an object");
    TraceStep s;
    s.step_index = field<int>(j, "index");
    s.url = field<std::string>(j, "url");
    s.scroll_y = field<double>(j, "scroll_y");
    s.viewport_height = field<double>(j, "viewport_height");
    s.page_height = field<double>(j, "page_height");
    if (j.contains("tabs")) {
        const auto& tabs = j.at("tabs");
        if (!tabs.is_array()) throw SchemaError("field 'tabs' must be an array");
        for (const auto& t : tabs)
            s.tabs.push_back({field<std::string>(t, "title"), field<std::string>(t, "url"),
                              optional_field<bool>(t, "current").value_or(false)});
    }

    auto& obs = s.observation;
    obs.task = task;
    obs.simplified_html.text = field<std::string>(j, "simplified_html");
    obs.simplified_html.token_estimate = (obs.simplified_html.text.size() + 3) / 4;
    const auto& ids = j.contains("id_map") ? j.at("id_map") : ojson::object();
    if (!ids.is_object()) throw SchemaError("field 'id_map' must be an object");
    for (const auto& [key, value] : ids.items()) {
        std::size_t used = 0;
        int id = -1;
        try {
            id = std::stoi(key, &used);
        } catch (const std::exception&) {
        }
        if (id < 0 || used != key.size() || !value.is_number_integer())
            throw SchemaError("bad id_map entry '" + key + "'");
        obs.simplified_html.id_map[id] = value.get<int>();
    }
    obs.tabs = tab_entries(s.tabs);
    try {
        obs.viewport = compute_viewport_pages(s.scroll_y, s.viewport_height, s.page_height);
    } catch (const Error& e) {
        throw SchemaError("step geometry: " + e.detail());
    }
    obs.previous_commands = field<std::vector<std::string>>(j, "previous_commands");

    auto text = field<std::string>(j, "action");
    auto parsed = parse_action(text);
    if (auto* d = std::get_if<ParseDiagnostic>(&parsed))
        throw SchemaError("unparsable action '" + text + "': " + d->detail);
    s.action = std::get<Action>(parsed);
    s.raw_completion = field<std::string>(j, "raw_completion");
    s.intent = optional_field<std::string>(j, "intent");
    s.user_response = optional_field<std::string>(j, "user_response");
    s.timestamp_ms = optional_field<std::int64_t>(j, "timestamp");
    return s;
}

Outcome outcome_from_json(const ojson& j) {
    if (!j.is_object()) throw SchemaError("outcome is not an object");
    auto kind = field<std::string>(j, "kind");
    if (kind == "finished") return Outcome::finished(optional_field<std::string>(j, "answer"));
    if (kind == "step_cap") return Outcome::step_cap();
    if (kind == "user_abort") return Outcome::user_abort();
    if (kind == "error") return Outcome::error(optional_field<std::string>(j, "detail").value_or(""));
    throw SchemaError("unknown outcome kind '" + kind + "'");
}

}  // namespace

std::string trace_to_json_line(const Trace& trace, const TraceWriteOptions& options) {
    ojson j;
    j["task"] = trace.task;
    j["site"] = trace.site;
    j["language"] = to_string(trace.language);
    ojson steps = ojson::array();
    for (const auto& s : trace.steps) steps.push_back(step_to_json(s, options));
    j["steps"] = std::move(steps);
    ojson outcome;
    outcome["kind"] = to_string(trace.outcome.kind);
    if (trace.outcome.answer) outcome["answer"] = *trace.outcome.answer;
    if (trace.outcome.kind == Outcome::Kind::Error) outcome["detail"] = trace.outcome.detail;
    j["outcome"] = std::move(outcome);
    if (!trace.diagnostics.empty()) {
        ojson diags = ojson::array();
        for (const auto& d : trace.diagnostics)
            diags.push_back({{"step", d.step_index}, {"attempt", d.attempt},
                             {"raw_completion", d.raw_completion}, {"detail", d.detail}});
        j["diagnostics"] = std::move(diags);
    }
    // Replace rather than throw on invalid UTF-8 coming from pages or models.
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Trace trace_from_json_line(const std::string& line) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("trace is not an object");
    Trace t;
    t.task = field<std::string>(j, "task");
    t.site = optional_field<std::string>(j, "site").value_or("");
    t.language = parse_language(optional_field<std::string>(j, "language").value_or("en"));
    const auto& steps = j.contains("steps") ? j.at("steps") : ojson();
    if (!steps.is_array()) throw SchemaError("field 'steps' must be an array");
    for (const auto& s : steps) t.steps.push_back(step_from_json(s, t.task));
    t.outcome = outcome_from_json(j.contains("outcome") ? j.at("outcome") : ojson());
    if (j.contains("diagnostics")) {
        const auto& diags = j.at("diagnostics");
        if (!diags.is_array()) throw SchemaError("field 'diagnostics' must be an array");
        for (const auto& d : diags)
            t.diagnostics.push_back({field<int>(d, "step"), field<int>(d, "attempt"),
                                     field<std::string>(d, "raw_completion"), field<std::string>(d, "detail")});
    }
    check_trace(t);
    return t;
}

std::vector<Trace> read_traces(std::istream& in) {
    std::vector<Trace> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(trace_from_json_line(line));
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(lineno) + ": " + e.detail());
        }
    }
    return out;
}

void write_traces(std::ostream& out, const std::vector<Trace>& traces, const TraceWriteOptions& options) {
    for (const auto& t : traces) out << trace_to_json_line(t, options) << '\n';
}

}  // namespace webnav
