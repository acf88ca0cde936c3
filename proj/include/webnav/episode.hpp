#pragma once

#include "webnav/environment.hpp"
#include "webnav/observation.hpp"
#include "webnav/policy.hpp"
#include "webnav/pruner.hpp"
#include "webnav/trace.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace webnav {

inline constexpr int kDefaultMaxSteps = 25;
inline constexpr int kDefaultMaxRetries = 2;

struct EpisodeOptions {
    int max_steps = kDefaultMaxSteps;
    int max_retries = kDefaultMaxRetries;
    std::size_t history_cap = kDefaultHistoryCap;
    PrunerConfig pruner;
    bool timestamps = true;
    std::optional<std::string> site;      // default: registrable domain of the first page
    std::optional<Language> language;     // default: detected from the task
    // Answers user_input; nullopt aborts the episode. When unset the answer
    // is the empty string.
    std::function<std::optional<std::string>(const std::string& message)> user_input;
    std::function<void(std::string_view)> log;
    std::function<void(const TraceStep&)> on_step;
};

Observation observe(const PageState& state, const std::optional<SimplifiedHtml>& recorded, const std::string& task,
                    const History& history, const PrunerConfig& cfg);

// Runs the observe / complete / parse / validate / apply loop until the
// policy finishes or `max_steps` actions were taken. Policy and environment
// failures end up in the outcome. Throws InvalidConfig for max_steps < 1.
Trace run_episode(Environment& env, Policy& policy, const std::string& task, const EpisodeOptions& options = {});

// Replays a recorded trace against its own pages and completions.
Trace replay_trace(const Trace& recorded, EpisodeOptions options = {});

}  // namespace webnav
