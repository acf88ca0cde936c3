#include "webnav/alignment.hpp"
#include "webnav/errors.hpp"
#include "webnav/evaluator.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace webnav {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFiniteInput(std::string(what) + " is not finite");
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double margin(const LossInputs& in) {
    double dw = in.logp_policy_chosen - in.logp_ref_chosen;
    double dl = in.logp_policy_rejected - in.logp_ref_rejected;
    return in.beta * (dw - dl);
}

Action parse_or_throw(const std::string& text) {
    auto parsed = parse_action(text);
    if (auto* d = std::get_if<ParseDiagnostic>(&parsed))
        throw SchemaError("unparsable action '" + text + "': " + d->detail);
    return std::get<Action>(parsed);
}

}  // namespace

void check_loss_inputs(const LossInputs& in) {
    require_finite(in.logp_policy_chosen, "logp_policy_chosen");
    require_finite(in.logp_ref_chosen, "logp_ref_chosen");
    require_finite(in.logp_policy_rejected, "logp_policy_rejected");
    require_finite(in.logp_ref_rejected, "logp_ref_rejected");
    require_finite(in.beta, "beta");
    require_finite(in.lambda, "lambda");
    if (in.beta <= 0) throw NonFiniteInput("beta must be positive");
    if (in.lambda < 0) throw NonFiniteInput("lambda must be non-negative");
}

double softplus(double x) {
    if (x > 0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double sft_loss(double logp_policy_chosen) {
    require_finite(logp_policy_chosen, "logp_policy_chosen");
    return -logp_policy_chosen;
}

double sft_loss_mean(const std::vector<double>& logps) {
    if (logps.empty()) throw NonFiniteInput("mean over an empty batch");
    double sum = 0;
    for (double v : logps) sum += sft_loss(v);
    return sum / static_cast<double>(logps.size());
}

double dpo_loss(const LossInputs& in) {
    check_loss_inputs(in);
    // -log sigmoid(z) = softplus(-z)
    return softplus(-margin(in));
}

double total_loss(const LossInputs& in, LossMode mode) {
    double dpo = dpo_loss(in);
    double sft = sft_loss(in.logp_policy_chosen);
    if (mode == LossMode::SftWeighted) return dpo + kSftWeight * sft;
    return in.lambda * dpo + sft;
}

std::array<double, 4> grad_dpo(const LossInputs& in) {
    check_loss_inputs(in);
    double bs = in.beta * sigmoid(-margin(in));
    return {-bs, bs, bs, -bs};
}

void judge_samples(SampleSet& set) {
    for (auto& s : set.samples) s.correct = judge_step(s.action, set.gold).success;
}

std::vector<PreferencePair> filter_preference_pairs(const std::vector<SampleSet>& sets) {
    std::vector<PreferencePair> out;
    for (const auto& set : sets) {
        std::size_t correct = 0;
        for (const auto& s : set.samples) correct += s.correct ? 1 : 0;
        if (correct == 0 || correct == set.samples.size()) continue;

        std::string chosen = to_command_string(set.gold);
        std::set<std::string> seen{to_command_string(set.gold.command)};
        for (const auto& s : set.samples) {
            if (s.correct) continue;
            if (!seen.insert(to_command_string(s.action.command)).second) continue;
            out.push_back({set.prompt, chosen, to_command_string(s.action)});
        }
    }
    return out;
}

std::string pair_to_json_line(const PreferencePair& pair) {
    nlohmann::ordered_json j;
    j["prompt"] = pair.prompt;
    j["chosen"] = pair.chosen;
    j["rejected"] = pair.rejected;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

SampleSet sample_set_from_json_line(const std::string& line) {
    SampleSet set;
    try {
        auto j = nlohmann::json::parse(line);
        set.task_id = j.value("task_id", std::string());
        set.prompt = j.at("prompt").get<std::string>();
        set.gold = parse_or_throw(j.at("gold").get<std::string>());
        for (const auto& s : j.at("samples")) {
            Sample sample;
            if (s.is_string()) {
                sample.action = parse_or_throw(s.get<std::string>());
                sample.correct = judge_step(sample.action, set.gold).success;
            } else {
                sample.action = parse_or_throw(s.at("action").get<std::string>());
                sample.correct = s.contains("correct") ? s.at("correct").get<bool>()
                                                       : judge_step(sample.action, set.gold).success;
            }
            set.samples.push_back(std::move(sample));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("sample set: ") + e.what());
    }
    return set;
}

std::vector<Trace> select_rft_traces(const std::vector<Trace>& traces, const Adjudicator& adjudicator) {
    std::vector<Trace> out;
    std::map<std::string, std::set<std::vector<std::string>>> seen;
    for (const auto& t : traces) {
        if (!adjudicator(t.task, t)) continue;
        std::vector<std::string> key;
        for (const auto& s : t.steps) key.push_back(to_command_string(s.action.command));
        if (seen[t.task].insert(std::move(key)).second) out.push_back(t);
    }
    return out;
}

}  // namespace webnav
