#pragma once

#include "webnav/action.hpp"
#include "webnav/policy.hpp"
#include "webnav/trace.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace webnav {

struct StepJudgment {
    bool element_match = false;
    bool operation_match = false;
    bool argument_match = false;
    bool success = false;

    bool operator==(const StepJudgment&) const = default;
};

// Both actions must refer to the same observation.
StepJudgment judge_step(const Action& predicted, const Action& gold);

enum class Domain { InDomain, OutOfDomain };

std::string_view to_string(Domain d);

struct SplitKey {
    Domain domain = Domain::InDomain;
    Language language = Language::En;

    auto operator<=>(const SplitKey&) const = default;
};

std::string to_string(const SplitKey& key);

struct SplitSpec {
    std::set<std::string> train_sites;
};

// {"train_sites": [...]}. Throws SchemaError.
SplitSpec parse_split_spec(const std::string& json_text);

// Trace indices per split. Throws MissingSite on a trace without a site.
std::map<SplitKey, std::vector<std::size_t>> split_bench(const std::vector<Trace>& traces, const SplitSpec& spec);

inline constexpr std::size_t kActionKinds = std::variant_size_v<Command>;
// Extra column for predictions that failed to parse or to reach the policy.
inline constexpr std::size_t kNoAction = kActionKinds;

struct SplitScore {
    std::size_t steps = 0;
    std::size_t successful_steps = 0;
    std::size_t traces = 0;
    std::size_t successful_traces = 0;
    std::size_t unparsable = 0;
    std::size_t policy_errors = 0;

    double ssr() const { return steps ? static_cast<double>(successful_steps) / static_cast<double>(steps) : 0.0; }
    double trace_success() const {
        return traces ? static_cast<double>(successful_traces) / static_cast<double>(traces) : 0.0;
    }
};

struct BenchReport {
    std::string policy;
    std::map<SplitKey, SplitScore> splits;
    SplitScore overall;
    // confusion[gold kind][predicted kind]; the last column counts failures.
    std::array<std::array<std::size_t, kActionKinds + 1>, kActionKinds> confusion{};
    std::vector<bool> trace_success;  // in input order
};

struct EvaluateOptions {
    std::size_t workers = 1;
};

// Teacher-forced: every gold step's recorded observation is rendered again
// and the policy is asked once. The environment is never touched.
BenchReport evaluate(const std::vector<Trace>& traces, Policy& policy, const SplitSpec& spec,
                     const EvaluateOptions& options = {});

std::string report_to_json(const BenchReport& report);

// Rows are in/out of domain, columns en and zh.
std::string report_to_table(const BenchReport& report);

// A lookup table from each gold step's prompt to its gold command.
std::map<std::string, std::string> gold_completions(const std::vector<Trace>& traces);

}  // namespace webnav
