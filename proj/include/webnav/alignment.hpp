#pragma once

#include "webnav/action.hpp"
#include "webnav/trace.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace webnav {

inline constexpr double kDefaultBeta = 0.15;
inline constexpr double kDefaultLambda = 1.25;
inline constexpr double kSftWeight = 0.8;

struct LossInputs {
    double logp_policy_chosen = 0;
    double logp_ref_chosen = 0;
    double logp_policy_rejected = 0;
    double logp_ref_rejected = 0;
    double beta = kDefaultBeta;
    double lambda = kDefaultLambda;
};

// Throws NonFiniteInput on non-finite values, beta <= 0 or lambda < 0.
void check_loss_inputs(const LossInputs& in);

// Negative log-likelihood of the chosen output.
double sft_loss(double logp_policy_chosen);
double sft_loss_mean(const std::vector<double>& logp_policy_chosen);

// -log sigmoid(beta * (dw - dl)); stable for arguments of any magnitude.
double dpo_loss(const LossInputs& in);

enum class LossMode {
    DpoWeighted,  // lambda * dpo + sft
    SftWeighted,  // dpo + 0.8 * sft
};

double total_loss(const LossInputs& in, LossMode mode = LossMode::DpoWeighted);

// d loss / d (policy_chosen, ref_chosen, policy_rejected, ref_rejected).
std::array<double, 4> grad_dpo(const LossInputs& in);

// log(1 + exp(x)) without overflow.
double softplus(double x);

struct Sample {
    Action action;
    bool correct = false;
};

struct SampleSet {
    std::string task_id;
    std::string prompt;
    Action gold;
    std::vector<Sample> samples;
};

// Marks every sample with judge_step against the gold action.
void judge_samples(SampleSet& set);

struct PreferencePair {
    std::string prompt;
    std::string chosen;
    std::string rejected;

    bool operator==(const PreferencePair&) const = default;
};

// Sets where every sample or no sample is correct are dropped. Each distinct
// wrong command (compared without its comment) yields one pair against the
// gold command, in first-seen order.
std::vector<PreferencePair> filter_preference_pairs(const std::vector<SampleSet>& sets);

std::string pair_to_json_line(const PreferencePair& pair);

// {"task_id", "prompt", "gold", "samples": [{"action", "correct"?}]}.
// A missing "correct" is filled in by judge_step. Throws SchemaError.
SampleSet sample_set_from_json_line(const std::string& line);

using Adjudicator = std::function<bool(const std::string& task, const Trace& trace)>;

// Traces the adjudicator accepts, keeping the first of each task's traces
// that share an action sequence.
std::vector<Trace> select_rft_traces(const std::vector<Trace>& traces, const Adjudicator& adjudicator);

enum class ConstructionPrompt { Recognition, SimpleTask, TraceIntent };

// Throws MissingField for an unknown name.
ConstructionPrompt parse_construction_kind(std::string_view name);

// Placeholders each template needs.
std::vector<std::string> construction_fields(ConstructionPrompt kind);

// Substitutes the named placeholders; other braces are left alone. Throws
// MissingField when a required field is absent.
std::string render_construction_prompt(ConstructionPrompt kind, const std::map<std::string, std::string>& fields);
std::string render_construction_prompt(std::string_view kind, const std::map<std::string, std::string>& fields);

}  // namespace webnav
