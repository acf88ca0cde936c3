#include "webnav/evaluator.hpp"
#include "webnav/errors.hpp"
#include "webnav/observation.hpp"
#include "webnav/text.hpp"
#include "webnav/url.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace webnav {

StepJudgment judge_step(const Action& predicted, const Action& gold) {
    StepJudgment j;
    j.operation_match = predicted.command.index() == gold.command.index();

    auto gold_target = target_element(gold);
    auto pred_target = target_element(predicted);
    j.element_match = !gold_target || (pred_target && *pred_target == *gold_target);

    if (j.operation_match) {
        j.argument_match = std::visit(
            [&](const auto& g) -> bool {
                using T = std::decay_t<decltype(g)>;
                const auto& p = std::get<T>(predicted.command);
                if constexpr (std::is_same_v<T, cmd::Select>) {
                    return normalize_for_match(p.option) == normalize_for_match(g.option);
                } else if constexpr (std::is_same_v<T, cmd::TypeString>) {
                    return normalize_for_match(p.content) == normalize_for_match(g.content) &&
                           p.press_enter == g.press_enter;
                } else if constexpr (std::is_same_v<T, cmd::ScrollPage> || std::is_same_v<T, cmd::Go>) {
                    return p.direction == g.direction;
                } else if constexpr (std::is_same_v<T, cmd::JumpTo>) {
                    return normalize_url_for_match(p.url) == normalize_url_for_match(g.url);
                } else if constexpr (std::is_same_v<T, cmd::SwitchTab>) {
                    return p.tab_index == g.tab_index;
                } else if constexpr (std::is_same_v<T, cmd::Finish>) {
                    return p.answer.has_value() == g.answer.has_value();
                } else {
                    return true;
                }
            },
            gold.command);
    }
    j.success = j.element_match && j.operation_match && j.argument_match;
    return j;
}

std::string_view to_string(Domain d) { return d == Domain::InDomain ? "in_domain" : "out_of_domain"; }

std::string to_string(const SplitKey& key) {
    return std::string(to_string(key.domain)) + "/" + std::string(to_string(key.language));
}

SplitSpec parse_split_spec(const std::string& json_text) {
    SplitSpec spec;
    try {
        auto j = nlohmann::json::parse(json_text);
        for (const auto& s : j.at("train_sites")) spec.train_sites.insert(s.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("split spec: ") + e.what());
    }
    return spec;
}

namespace {

SplitKey key_of(const Trace& t, const SplitSpec& spec) {
    if (t.site.empty()) throw MissingSite("trace for task '" + t.task + "' has no site");
    return {spec.train_sites.count(t.site) ? Domain::InDomain : Domain::OutOfDomain, t.language};
}

struct StepResult {
    enum class State { Judged, Unparsable, PolicyError } state = State::PolicyError;
    std::size_t predicted_kind = kNoAction;
    StepJudgment judgment;
};

void add(SplitScore& score, const SplitScore& part) {
    score.steps += part.steps;
    score.successful_steps += part.successful_steps;
    score.traces += part.traces;
    score.successful_traces += part.successful_traces;
    score.unparsable += part.unparsable;
    score.policy_errors += part.policy_errors;
}

}  // namespace

std::map<SplitKey, std::vector<std::size_t>> split_bench(const std::vector<Trace>& traces, const SplitSpec& spec) {
    std::map<SplitKey, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < traces.size(); ++i) out[key_of(traces[i], spec)].push_back(i);
    return out;
}

BenchReport evaluate(const std::vector<Trace>& traces, Policy& policy, const SplitSpec& spec,
                     const EvaluateOptions& options) {
    auto splits = split_bench(traces, spec);

    std::vector<std::pair<std::size_t, std::size_t>> items;
    for (std::size_t t = 0; t < traces.size(); ++t)
        for (std::size_t s = 0; s < traces[t].steps.size(); ++s) items.emplace_back(t, s);
    std::vector<StepResult> results(items.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            const auto& [t, s] = items[i];
            const TraceStep& step = traces[t].steps[s];
            Observation obs = step.observation;
            obs.task = traces[t].task;
            StepResult& r = results[i];
            std::string completion;
            try {
                completion = policy.complete(render_prompt(obs));
            } catch (const std::exception&) {
                r.state = StepResult::State::PolicyError;
                continue;
            }
            auto parsed = parse_action(completion);
            if (auto* a = std::get_if<Action>(&parsed)) {
                r.state = StepResult::State::Judged;
                r.predicted_kind = a->command.index();
                r.judgment = judge_step(*a, step.action);
            } else {
                r.state = StepResult::State::Unparsable;
            }
        }
    };
    std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, items.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    BenchReport report;
    report.policy = policy.identity();
    report.trace_success.assign(traces.size(), false);
    std::vector<SplitScore> per_trace(traces.size());
    for (std::size_t t = 0; t < traces.size(); ++t) per_trace[t].traces = 1;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& [t, s] = items[i];
        const auto& r = results[i];
        SplitScore& score = per_trace[t];
        ++score.steps;
        if (r.state == StepResult::State::Judged && r.judgment.success) ++score.successful_steps;
        if (r.state == StepResult::State::Unparsable) ++score.unparsable;
        if (r.state == StepResult::State::PolicyError) ++score.policy_errors;
        ++report.confusion[traces[t].steps[s].action.command.index()][r.predicted_kind];
    }
    for (std::size_t t = 0; t < traces.size(); ++t) {
        bool ok = per_trace[t].steps > 0 && per_trace[t].successful_steps == per_trace[t].steps;
        per_trace[t].successful_traces = ok ? 1 : 0;
        report.trace_success[t] = ok;
    }
    for (const auto& [key, indices] : splits) {
        SplitScore& score = report.splits[key];
        for (auto t : indices) add(score, per_trace[t]);
        add(report.overall, score);
    }
    return report;
}

namespace {

const std::array<std::string_view, kActionKinds + 1> kKindNames = {
    "click", "hover", "select", "type_string", "scroll_page", "go",
    "jump_to", "switch_tab", "user_input", "finish", "none"};

nlohmann::ordered_json score_json(const SplitScore& s) {
    return {{"steps", s.steps},
            {"successful_steps", s.successful_steps},
            {"ssr", s.ssr()},
            {"traces", s.traces},
            {"successful_traces", s.successful_traces},
            {"trace_success", s.trace_success()},
            {"unparsable", s.unparsable},
            {"policy_errors", s.policy_errors}};
}

}  // namespace

std::string report_to_json(const BenchReport& report) {
    nlohmann::ordered_json j;
    j["policy"] = report.policy;
    j["overall"] = score_json(report.overall);
    auto splits = nlohmann::ordered_json::array();
    for (const auto& [key, score] : report.splits) {
        auto s = score_json(score);
        s["domain"] = to_string(key.domain);
        s["language"] = to_string(key.language);
        splits.push_back(std::move(s));
    }
    j["splits"] = std::move(splits);
    auto confusion = nlohmann::ordered_json::object();
    for (std::size_t g = 0; g < kActionKinds; ++g) {
        auto row = nlohmann::ordered_json::object();
        for (std::size_t p = 0; p <= kActionKinds; ++p)
            if (report.confusion[g][p]) row[std::string(kKindNames[p])] = report.confusion[g][p];
        if (!row.empty()) confusion[std::string(kKindNames[g])] = std::move(row);
    }
    j["confusion"] = std::move(confusion);
    j["trace_success"] = report.trace_success;
    return j.dump(2);
}

std::string report_to_table(const BenchReport& report) {
    auto cell = [&](Domain d, Language l) -> std::string {
        auto it = report.splits.find({d, l});
        if (it == report.splits.end() || it->second.steps == 0) return "-";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", 100.0 * it->second.ssr());
        return buf;
    };
    std::size_t width = std::max<std::size_t>(report.policy.size(), 5) + 2;
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    std::string out;
    out += pad("Model", width) + pad("English", 28) + "Chinese\n";
    out += pad("", width) + pad("Cross-Task", 14) + pad("Cross-Domain", 14) + pad("Cross-Task", 14) + "Cross-Domain\n";
    out += pad(report.policy, width) + pad(cell(Domain::InDomain, Language::En), 14) +
           pad(cell(Domain::OutOfDomain, Language::En), 14) + pad(cell(Domain::InDomain, Language::Zh), 14) +
           cell(Domain::OutOfDomain, Language::Zh) + "\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "overall SSR %.3f over %zu steps, whole-trace success %.3f over %zu traces\n",
                  report.overall.ssr(), report.overall.steps, report.overall.trace_success(), report.overall.traces);
    out += buf;
    return out;
}

std::map<std::string, std::string> gold_completions(const std::vector<Trace>& traces) {
    std::map<std::string, std::string> table;
    for (const auto& t : traces)
        for (const auto& s : t.steps) {
            Observation obs = s.observation;
            obs.task = t.task;
            table.emplace(render_prompt(obs), to_command_string(s.action));
        }
    return table;
}

}  // namespace webnav
