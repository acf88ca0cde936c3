#include "webnav/environment.hpp"
#include "webnav/errors.hpp"

#include <algorithm>

namespace webnav {

PageState recorded_page(const TraceStep& step) {
    PageState state;
    state.tree = adopt_serialized_ids(parse_html("<html>" + step.observation.simplified_html.text + "</html>"));
    state.tree.source_url = step.url;
    state.url = step.url;
    state.scroll_y = step.scroll_y;
    state.viewport_height = step.viewport_height;
    state.page_height = step.page_height;
    state.tabs = step.tabs;
    return state;
}

std::vector<std::string> recorded_completions(const Trace& trace) {
    std::vector<std::string> out;
    auto rejected_at = [&](int step) {
        std::vector<const StepDiagnostic*> found;
        for (const auto& d : trace.diagnostics)
            if (d.step_index == step) found.push_back(&d);
        std::stable_sort(found.begin(), found.end(),
                         [](const auto* a, const auto* b) { return a->attempt < b->attempt; });
        for (const auto* d : found) out.push_back(d->raw_completion);
    };
    for (const auto& s : trace.steps) {
        rejected_at(s.step_index);
        out.push_back(s.raw_completion);
    }
    rejected_at(static_cast<int>(trace.steps.size()));
    return out;
}

ReplayEnvironment::ReplayEnvironment(const Trace& trace) {
    for (const auto& s : trace.steps) {
        states_.push_back(recorded_page(s));
        views_.push_back(s.observation.simplified_html);
    }
}

const PageState& ReplayEnvironment::current() const {
    if (cursor_ >= states_.size())
        throw ExhaustedTrace("no recorded page after step " + std::to_string(states_.size()));
    return states_[cursor_];
}

PageState ReplayEnvironment::reset(const std::string&) {
    cursor_ = 0;
    return current();
}

PageState ReplayEnvironment::apply(const Action&, const std::map<int, int>&) {
    const PageState& before = current();
    ++cursor_;
    return cursor_ < states_.size() ? states_[cursor_] : before;
}

PageState ReplayEnvironment::snapshot() { return current(); }

std::optional<SimplifiedHtml> ReplayEnvironment::recorded_view() const {
    if (cursor_ >= views_.size()) return std::nullopt;
    return views_[cursor_];
}

}  // namespace webnav
