#include "webnav/episode.hpp"
#include "webnav/errors.hpp"
#include "webnav/url.hpp"

#include <chrono>

namespace webnav {

namespace {

std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string describe(const ParseDiagnostic& d) {
    return std::string(to_string(d.kind)) + ": " + d.detail;
}

std::string describe(const std::vector<ValidationError>& errors) {
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty()) out += "; ";
        out += std::string(to_string(e.kind)) + ": " + e.detail;
    }
    return out;
}

void log_line(const EpisodeOptions& options, const std::string& line) {
    if (options.log) options.log(line);
}

}  // namespace

Observation observe(const PageState& state, const std::optional<SimplifiedHtml>& recorded, const std::string& task,
                    const History& history, const PrunerConfig& cfg) {
    Observation obs;
    obs.task = task;
    obs.simplified_html = recorded ? *recorded : simplify_page(state.tree, cfg);
    obs.tabs = tab_entries(state.tabs);
    obs.viewport = compute_viewport_pages(state.scroll_y, state.viewport_height, state.page_height);
    obs.previous_commands = history.commands;
    return obs;
}

Trace run_episode(Environment& env, Policy& policy, const std::string& task, const EpisodeOptions& options) {
    if (options.max_steps < 1) throw InvalidConfig("max_steps must be at least 1");
    if (options.max_retries < 0) throw InvalidConfig("max_retries must be non-negative");
    check_config(options.pruner);

    Trace trace;
    trace.task = task;
    trace.language = options.language.value_or(detect_language(task));
    if (options.site) trace.site = *options.site;
    History history{{}, options.history_cap};

    auto fail = [&](const std::string& where, const std::exception& e) {
        trace.outcome = Outcome::error(where + ": " + e.what());
        log_line(options, "episode aborted, " + trace.outcome.detail);
    };

    for (int step = 0;; ++step) {
        if (step >= options.max_steps) {
            trace.outcome = Outcome::step_cap();
            break;
        }

        PageState state;
        Observation obs;
        std::optional<SimplifiedHtml> recorded;
        try {
            state = step == 0 ? env.reset(task) : env.snapshot();
            recorded = env.recorded_view();
            obs = observe(state, recorded, task, history, options.pruner);
        } catch (const Error& e) {
            fail("environment", e);
            break;
        }
        if (step == 0 && !options.site) trace.site = registrable_domain(state.url);

        // Recorded pages are re-read, so ground against the rebuilt tree.
        const std::map<int, int> id_map = recorded ? operable_index(state.tree) : obs.simplified_html.id_map;
        const std::string prompt = render_prompt(obs);

        std::optional<Action> accepted;
        std::string completion;
        std::string last_problem;
        bool policy_failed = false;
        for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
            try {
                completion = policy.complete(prompt);
            } catch (const std::exception& e) {
                fail("policy", e);
                policy_failed = true;
                break;
            }
            auto parsed = parse_action(completion);
            if (auto* diag = std::get_if<ParseDiagnostic>(&parsed)) {
                last_problem = describe(*diag);
            } else {
                auto errors = validate(std::get<Action>(parsed), state, id_map);
                if (errors.empty()) {
                    accepted = std::get<Action>(std::move(parsed));
                    break;
                }
                last_problem = describe(errors);
            }
            trace.diagnostics.push_back({step, attempt, completion, last_problem});
            log_line(options, "step " + std::to_string(step) + " attempt " + std::to_string(attempt) +
                                  " rejected: " + last_problem);
        }
        if (policy_failed) break;
        if (!accepted) {
            trace.outcome = Outcome::error("no valid action after " + std::to_string(options.max_retries + 1) +
                                           " attempts: " + last_problem);
            break;
        }

        TraceStep ts;
        ts.step_index = step;
        ts.url = state.url;
        ts.scroll_y = state.scroll_y;
        ts.viewport_height = state.viewport_height;
        ts.page_height = state.page_height;
        ts.tabs = state.tabs;
        ts.observation = std::move(obs);
        ts.action = *accepted;
        ts.raw_completion = completion;
        if (options.timestamps) ts.timestamp_ms = now_ms();

        if (const auto* finish = accepted->get<cmd::Finish>()) {
            trace.steps.push_back(std::move(ts));
            if (options.on_step) options.on_step(trace.steps.back());
            trace.outcome = Outcome::finished(finish->answer);
            break;
        }
        if (const auto* ask = accepted->get<cmd::UserInput>()) {
            std::optional<std::string> response;
            if (options.user_input) {
                response = options.user_input(ask->message);
            } else {
                response = "";
                log_line(options, "user_input(\"" + ask->message + "\") answered with an empty string");
            }
            ts.user_response = response;
            if (!response) {
                trace.steps.push_back(std::move(ts));
                if (options.on_step) options.on_step(trace.steps.back());
                trace.outcome = Outcome::user_abort();
                break;
            }
        }

        trace.steps.push_back(std::move(ts));
        if (options.on_step) options.on_step(trace.steps.back());
        try {
            env.apply(*accepted, id_map);
        } catch (const Error& e) {
            fail("environment", e);
            break;
        }
        history = update_history(std::move(history), *accepted);
    }
    return trace;
}

Trace replay_trace(const Trace& recorded, EpisodeOptions options) {
    ReplayEnvironment env(recorded);
    ScriptedPolicy policy(recorded_completions(recorded), false, "replay");
    // A run that failed before recording its last step needs one more turn
    // to reach the same failure.
    std::size_t steps = recorded.steps.size() + (recorded.outcome.kind == Outcome::Kind::Error ? 1 : 0);
    options.max_steps = static_cast<int>(std::max<std::size_t>(1, steps));
    options.site = recorded.site;
    options.language = recorded.language;
    std::vector<std::optional<std::string>> responses;
    for (const auto& s : recorded.steps)
        if (s.action.is<cmd::UserInput>()) responses.push_back(s.user_response);
    std::size_t next_response = 0;
    options.user_input = [&](const std::string&) -> std::optional<std::string> {
        if (next_response < responses.size()) return responses[next_response++];
        return std::string();
    };
    Trace out = run_episode(env, policy, recorded.task, options);
    // Intents are annotations on the recording, not something a run produces.
    for (std::size_t i = 0; i < out.steps.size() && i < recorded.steps.size(); ++i)
        if (out.steps[i].action == recorded.steps[i].action) out.steps[i].intent = recorded.steps[i].intent;
    return out;
}

}  // namespace webnav
