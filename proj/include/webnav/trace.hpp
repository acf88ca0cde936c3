#pragma once

#include "webnav/action.hpp"
#include "webnav/dom.hpp"
#include "webnav/observation.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace webnav {

enum class Language { En, Zh, Other };

std::string_view to_string(Language lang);
Language parse_language(std::string_view s);  // throws SchemaError

// Guess from the task text: any CJK ideograph means zh, otherwise en.
Language detect_language(std::string_view task);

struct TraceStep {
    int step_index = 0;
    // Page geometry and tabs at observation time.
    std::string url;
    double scroll_y = 0;
    double viewport_height = 0;
    double page_height = 0;
    std::vector<Tab> tabs;

    Observation observation;
    Action action;
    std::string raw_completion;
    std::optional<std::string> intent;
    std::optional<std::string> user_response;
    std::optional<std::int64_t> timestamp_ms;

    bool operator==(const TraceStep&) const = default;
};

struct Outcome {
    enum class Kind { Finished, StepCap, UserAbort, Error };

    Kind kind = Kind::Error;
    std::optional<std::string> answer;  // Finished only
    std::string detail;                 // Error only

    static Outcome finished(std::optional<std::string> answer) { return {Kind::Finished, std::move(answer), {}}; }
    static Outcome step_cap() { return {Kind::StepCap, std::nullopt, {}}; }
    static Outcome user_abort() { return {Kind::UserAbort, std::nullopt, {}}; }
    static Outcome error(std::string detail) { return {Kind::Error, std::nullopt, std::move(detail)}; }

    bool operator==(const Outcome&) const = default;
};

std::string_view to_string(Outcome::Kind kind);

// A rejected completion. Retries re-prompt with the same observation.
struct StepDiagnostic {
    int step_index = 0;
    int attempt = 0;
    std::string raw_completion;
    std::string detail;

    bool operator==(const StepDiagnostic&) const = default;
};

struct Trace {
    std::string task;
    std::string site;
    Language language = Language::En;
    std::vector<TraceStep> steps;
    Outcome outcome;
    std::vector<StepDiagnostic> diagnostics;

    bool operator==(const Trace&) const = default;
};

// Step indices contiguous from 0, finished iff the last step is Finish.
// Throws SchemaError.
void check_trace(const Trace& trace);

std::vector<Action> action_sequence(const Trace& trace);

struct TraceWriteOptions {
    bool timestamps = true;
};

// One JSON object on a single line, no trailing newline.
std::string trace_to_json_line(const Trace& trace, const TraceWriteOptions& options = {});

// Throws SchemaError on any malformed or missing field.
Trace trace_from_json_line(const std::string& line);

// Blank lines are skipped. Errors carry the 1-based line number.
std::vector<Trace> read_traces(std::istream& in);
void write_traces(std::ostream& out, const std::vector<Trace>& traces, const TraceWriteOptions& options = {});

}  // namespace webnav
