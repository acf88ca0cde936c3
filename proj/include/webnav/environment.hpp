#pragma once

#include "webnav/action.hpp"
#include "webnav/dom.hpp"
#include "webnav/pruner.hpp"
#include "webnav/trace.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace webnav {

// The transition function of the decision process. Operable ids in the
// returned trees are already assigned. Failures throw EnvironmentError.
class Environment {
public:
    virtual ~Environment() = default;

    virtual PageState reset(const std::string& task) = 0;
    // `id_map` maps operable ids to node indices of the latest snapshot.
    virtual PageState apply(const Action& action, const std::map<int, int>& id_map) = 0;
    virtual PageState snapshot() = 0;

    // A frozen observation for the current state, when the environment
    // replays recorded pages instead of simplifying live ones.
    virtual std::optional<SimplifiedHtml> recorded_view() const { return std::nullopt; }
};

// Steps through the pages of a recorded trace regardless of the actions it
// is given. Stepping past the last page throws ExhaustedTrace.
class ReplayEnvironment : public Environment {
public:
    explicit ReplayEnvironment(const Trace& trace);

    PageState reset(const std::string& task) override;
    PageState apply(const Action& action, const std::map<int, int>& id_map) override;
    PageState snapshot() override;
    std::optional<SimplifiedHtml> recorded_view() const override;

    std::size_t size() const { return states_.size(); }

private:
    const PageState& current() const;

    std::vector<PageState> states_;
    std::vector<SimplifiedHtml> views_;
    std::size_t cursor_ = 0;
};

// Rebuilds the page a trace step observed, with operable ids taken from the
// recorded simplified HTML.
PageState recorded_page(const TraceStep& step);

// Serves the recorded completions of a trace, rejected attempts included,
// in the order the original run consumed them.
std::vector<std::string> recorded_completions(const Trace& trace);

}  // namespace webnav
