#include "webnav/alignment.hpp"
#include "webnav/episode.hpp"
#include "webnav/errors.hpp"
#include "webnav/evaluator.hpp"
#include "webnav/text.hpp"
#include "webnav/url.hpp"
#include "webnav/webdriver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace webnav;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kSchema = 2, kBackend = 3 };

struct UsageError : Error {
    explicit UsageError(const std::string& detail) : Error("UsageError", detail) {}
};

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Trace> read_trace_file(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_traces(in);
}

// Output goes to `path`, or stdout for "-" / empty.
class Sink {
public:
    explicit Sink(const std::string& path, bool append = false) {
        if (path.empty() || path == "-") return;
        file_.open(path, append ? std::ios::app : std::ios::trunc);
        if (!file_) throw UsageError("cannot write " + path);
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// Flags beat environment variables, which beat the config file, which
// beats the built-in default.
struct Settings {
    json config = json::object();

    template <class T>
    T pick(const CLI::Option* flag, const T& flag_value, const char* env, const char* key, T fallback) const {
        if (flag && flag->count() > 0) return flag_value;
        if (env) {
            if (const char* v = std::getenv(env); v && *v) {
                if constexpr (std::is_same_v<T, std::string>) {
                    return std::string(v);
                } else {
                    try {
                        return json::parse(v).get<T>();
                    } catch (const json::exception&) {
                        throw UsageError(std::string("environment variable ") + env + " is not valid");
                    }
                }
            }
        }
        if (key) {
            const json* node = &config;
            std::string path = key;
            std::size_t start = 0;
            while (node && start <= path.size()) {
                auto dot = path.find('.', start);
                auto part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
                node = node->is_object() && node->contains(part) ? &(*node)[part] : nullptr;
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
            if (node) {
                try {
                    return node->get<T>();
                } catch (const json::exception&) {
                    throw UsageError(std::string("config field '") + key + "' has the wrong type");
                }
            }
        }
        return fallback;
    }
};

struct PrunerFlags {
    int d = 4, mc = 6, ms = 2, rcc = 1;
    bool reseed = false;
    CLI::Option *d_opt = nullptr, *mc_opt = nullptr, *ms_opt = nullptr, *rcc_opt = nullptr, *reseed_opt = nullptr;

    void attach(CLI::App* app) {
        d_opt = app->add_option("--d", d, "pruner depth radius");
        mc_opt = app->add_option("--mc", mc, "pruner children per node");
        ms_opt = app->add_option("--ms", ms, "pruner siblings per side");
        rcc_opt = app->add_option("--rcc", rcc, "pruner rounds");
        reseed_opt = app->add_flag("--reseed", reseed, "expand later rounds around everything collected so far");
    }

    PrunerConfig resolve(const Settings& s) const {
        PrunerConfig cfg;
        cfg.max_depth = s.pick(d_opt, d, nullptr, "pruner.d", cfg.max_depth);
        cfg.max_children = s.pick(mc_opt, mc, nullptr, "pruner.mc", cfg.max_children);
        cfg.max_siblings = s.pick(ms_opt, ms, nullptr, "pruner.ms", cfg.max_siblings);
        cfg.recursion_count = s.pick(rcc_opt, rcc, nullptr, "pruner.rcc", cfg.recursion_count);
        cfg.reseed = s.pick(reseed_opt, reseed, nullptr, "pruner.reseed", false);
        check_config(cfg);
        return cfg;
    }
};

struct PolicyFlags {
    std::string url, token;
    int max_tokens = 256;
    CLI::Option *url_opt = nullptr, *token_opt = nullptr, *max_tokens_opt = nullptr;

    void attach(CLI::App* app) {
        url_opt = app->add_option("--policy-url", url, "completion endpoint (WEBNAV_POLICY_URL)");
        token_opt = app->add_option("--policy-token", token, "bearer token (WEBNAV_POLICY_TOKEN)");
        max_tokens_opt = app->add_option("--max-tokens", max_tokens, "completion budget");
    }

    std::unique_ptr<Policy> http(const Settings& s) const {
        HttpPolicyOptions o;
        o.endpoint = s.pick(url_opt, url, "WEBNAV_POLICY_URL", "policy.url", std::string());
        o.auth_token = s.pick(token_opt, token, "WEBNAV_POLICY_TOKEN", "policy.token", std::string());
        o.max_tokens = s.pick(max_tokens_opt, max_tokens, nullptr, "policy.max_tokens", 256);
        if (o.endpoint.empty()) throw UsageError("no policy endpoint; pass --policy-url or set WEBNAV_POLICY_URL");
        return std::make_unique<HttpPolicy>(o);
    }
};

std::vector<std::string> read_lines(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

int cmd_prune(const Settings& s, const std::string& input, const PrunerFlags& flags, const std::string& id_map_path) {
    PrunerConfig cfg = flags.resolve(s);
    DomTree tree = detect_operable(parse_html(read_file(input)));
    SimplifiedHtml out = simplify_page(tree, cfg);
    std::cout << out.text << '\n';
    if (!id_map_path.empty()) {
        json ids = json::object();
        for (const auto& [id, node] : out.id_map) ids[std::to_string(id)] = node;
        Sink sink(id_map_path);
        sink.out() << ids.dump() << '\n';
    }
    std::cerr << "tokens~" << out.token_estimate << " operable=" << out.id_map.size() << '\n';
    return kOk;
}

EpisodeOptions episode_options(const Settings& s, const PrunerFlags& pf, const CLI::Option* steps_opt, int steps,
                               const CLI::Option* cap_opt, std::size_t cap) {
    EpisodeOptions o;
    o.pruner = pf.resolve(s);
    o.max_steps = s.pick(steps_opt, steps, "WEBNAV_MAX_STEPS", "max_steps", kDefaultMaxSteps);
    o.history_cap = s.pick(cap_opt, cap, nullptr, "history_cap", kDefaultHistoryCap);
    if (o.max_steps < 1) throw UsageError("max steps must be at least 1");
    o.log = [](std::string_view line) { std::cerr << line << '\n'; };
    return o;
}

int exit_for(const Outcome& outcome) {
    if (outcome.kind != Outcome::Kind::Error) return kOk;
    return kBackend;
}

std::string strip_timestamps(const Trace& t) { return trace_to_json_line(t, {false}); }

int cmd_replay(const std::string& path, const std::string& out_path, EpisodeOptions options) {
    auto traces = read_trace_file(path);
    options.timestamps = false;
    Sink sink(out_path);
    bool all_deterministic = true;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        Trace first = replay_trace(traces[i], options);
        Trace second = replay_trace(traces[i], options);
        bool deterministic = strip_timestamps(first) == strip_timestamps(second);
        bool faithful = strip_timestamps(first) == strip_timestamps(traces[i]);
        all_deterministic = all_deterministic && deterministic;
        std::cerr << "trace " << i << ": steps=" << first.steps.size()
                  << " outcome=" << to_string(first.outcome.kind)
                  << " deterministic=" << (deterministic ? "yes" : "no")
                  << " matches_recording=" << (faithful ? "yes" : "no") << '\n';
        sink.out() << trace_to_json_line(first, {false}) << '\n';
    }
    return all_deterministic ? kOk : kSchema;
}

using Adjudicators = std::map<std::string, std::string>;

Adjudicator make_adjudicator(const std::string& spec) {
    if (spec == "finished")
        return [](const std::string&, const Trace& t) { return t.outcome.kind == Outcome::Kind::Finished; };
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("adjudicator must be finished, answers=<file> or url=<file>");
    std::string kind = spec.substr(0, eq);
    json table;
    try {
        table = json::parse(read_file(spec.substr(eq + 1)));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("adjudicator table: ") + e.what());
    }
    auto expected = std::make_shared<Adjudicators>();
    for (const auto& [task, value] : table.items()) {
        if (!value.is_string()) throw SchemaError("adjudicator table values must be strings");
        (*expected)[task] = value.get<std::string>();
    }
    if (kind == "answers")
        return [expected](const std::string& task, const Trace& t) {
            auto it = expected->find(task);
            return it != expected->end() && t.outcome.kind == Outcome::Kind::Finished && t.outcome.answer &&
                   normalize_for_match(*t.outcome.answer) == normalize_for_match(it->second);
        };
    if (kind == "url")
        return [expected](const std::string& task, const Trace& t) {
            auto it = expected->find(task);
            return it != expected->end() && t.outcome.kind == Outcome::Kind::Finished && !t.steps.empty() &&
                   normalize_url_for_match(t.steps.back().url) == normalize_url_for_match(it->second);
        };
    throw UsageError("unknown adjudicator kind '" + kind + "'");
}

struct Check {
    std::string name;
    bool ok;
    std::string detail;
};

int cmd_losscheck(double beta, double lambda, LossMode mode, int samples, unsigned seed) {
    std::vector<Check> checks;
    auto fmt = [](double v) {
        std::ostringstream ss;
        ss.precision(17);
        ss << v;
        return ss.str();
    };

    LossInputs same{-1.0, -1.0, -2.0, -2.0, beta, lambda};
    double at_ref = dpo_loss(same);
    checks.push_back({"dpo at reference equals ln 2", std::abs(at_ref - std::log(2.0)) <= 1e-12, fmt(at_ref)});

    auto g = grad_dpo(same);
    checks.push_back({"gradient at reference is beta/2",
                      std::abs(g[1] - beta / 2) <= 1e-15 && std::abs(g[0] + beta / 2) <= 1e-15, fmt(g[1])});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logp(-10.0, 0.0);
    std::uniform_real_distribution<double> betas(0.05, 5.0);
    double worst = 0;
    double worst_sum = 0;
    const double h = 1e-6;
    auto nudge = [](LossInputs in, int k, double dx) {
        double* fields[4] = {&in.logp_policy_chosen, &in.logp_ref_chosen, &in.logp_policy_rejected,
                             &in.logp_ref_rejected};
        *fields[k] += dx;
        return in;
    };
    for (int i = 0; i < samples; ++i) {
        LossInputs in{logp(rng), logp(rng), logp(rng), logp(rng), betas(rng), lambda};
        auto grad = grad_dpo(in);
        double sum = 0;
        for (int k = 0; k < 4; ++k) {
            double fd = (dpo_loss(nudge(in, k, h)) - dpo_loss(nudge(in, k, -h))) / (2 * h);
            worst = std::max(worst, std::abs(fd - grad[k]) / std::abs(grad[k]));
            sum += grad[k];
        }
        worst_sum = std::max(worst_sum, std::abs(sum));
    }
    checks.push_back({"gradient matches central differences", worst < 1e-6, "max rel err " + fmt(worst)});
    checks.push_back({"gradient components sum to zero", worst_sum <= 1e-15, fmt(worst_sum)});

    LossInputs probe{-1.0, -1.2, -2.0, -1.5, beta, lambda};
    double total = total_loss(probe, mode);
    checks.push_back({mode == LossMode::DpoWeighted ? "total (lambda*dpo + sft) is finite"
                                                    : "total (dpo + 0.8*sft) is finite",
                      std::isfinite(total), fmt(total)});

    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        ok = ok && c.ok;
    }
    return ok ? kOk : kSchema;
}

int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    if (c == "PolicyError" || c == "EnvironmentError") return kBackend;
    if (c == "SchemaError" || c == "MissingField" || c == "MissingSite" || c == "EmptyDocument" ||
        c == "ExhaustedTrace" || c == "NonFiniteInput")
        return kSchema;
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Web navigation agent toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (WEBNAV_CONFIG)");

    // prune
    auto* prune = app.add_subcommand("prune", "simplify an HTML page");
    std::string prune_input = "-";
    std::string id_map_path;
    PrunerFlags prune_flags;
    prune->add_option("input", prune_input, "HTML file, - for stdin");
    prune->add_option("--id-map", id_map_path, "write the operable id map here as JSON");
    prune_flags.attach(prune);

    // run
    auto* run = app.add_subcommand("run", "run one episode in a live browser");
    std::string task, start_url, browser_url, run_out, script_path;
    int run_steps = kDefaultMaxSteps;
    std::size_t run_cap = kDefaultHistoryCap;
    bool interactive = false;
    PrunerFlags run_pruner;
    PolicyFlags run_policy;
    run->add_option("--task", task, "task description")->required();
    run->add_option("--url", start_url, "start page")->required();
    auto* browser_opt = run->add_option("--browser", browser_url, "WebDriver endpoint (WEBNAV_BROWSER_URL)");
    run->add_option("--out", run_out, "append the trace here (default stdout)");
    run->add_option("--script", script_path, "read completions from a file, one per line, instead of a backend");
    auto* run_steps_opt = run->add_option("--max-steps", run_steps, "step cap");
    auto* run_cap_opt = run->add_option("--history-cap", run_cap, "previous commands kept in the prompt");
    run->add_flag("--interactive", interactive, "answer user_input on the terminal");
    run_pruner.attach(run);
    run_policy.attach(run);

    // replay
    auto* replay = app.add_subcommand("replay", "replay recorded traces and check determinism");
    std::string replay_in, replay_out;
    std::size_t replay_cap = kDefaultHistoryCap;
    replay->add_option("traces", replay_in, "trace JSONL")->required();
    replay->add_option("--out", replay_out, "re-emitted traces (default stdout)");
    auto* replay_cap_opt = replay->add_option("--history-cap", replay_cap, "previous commands kept in the prompt");

    // eval
    auto* eval = app.add_subcommand("eval", "teacher-forced step success rate");
    std::string bench_path, split_path, policy_kind = "http", report_path;
    std::size_t workers = 1;
    PolicyFlags eval_policy;
    eval->add_option("--bench", bench_path, "gold trace JSONL")->required();
    eval->add_option("--split", split_path, "split spec JSON {train_sites: [...]}");
    eval->add_option("--policy", policy_kind, "oracle, const:<completion>, script:<file> or http");
    auto* workers_opt = eval->add_option("--workers", workers, "parallel policy calls");
    eval->add_option("--report", report_path, "write the JSON report here");
    eval_policy.attach(eval);

    // pairs
    auto* pairs = app.add_subcommand("pairs", "build preference pairs from sampled actions");
    std::string samples_path, pairs_out;
    pairs->add_option("--samples", samples_path, "sample-set JSONL")->required();
    pairs->add_option("--out", pairs_out, "pair JSONL (default stdout)");

    // rft
    auto* rft = app.add_subcommand("rft", "keep successful sampled traces");
    std::string rft_in, rft_out, adjudicator = "finished";
    rft->add_option("--traces", rft_in, "trace JSONL")->required();
    rft->add_option("--adjudicator", adjudicator, "finished, answers=<json file> or url=<json file>");
    rft->add_option("--out", rft_out, "trace JSONL (default stdout)");

    // losscheck
    auto* losscheck = app.add_subcommand("losscheck", "self-check the loss math");
    double beta = kDefaultBeta, lambda = kDefaultLambda;
    std::string mode_name = "dpo-weighted";
    int fd_samples = 1000;
    unsigned seed = 7;
    auto* beta_opt = losscheck->add_option("--beta", beta, "DPO temperature");
    auto* lambda_opt = losscheck->add_option("--lambda", lambda, "DPO weight in dpo-weighted mode");
    auto* mode_opt = losscheck->add_option("--mode", mode_name, "dpo-weighted or sft-weighted")
                         ->check(CLI::IsMember({"dpo-weighted", "sft-weighted"}));
    losscheck->add_option("--samples", fd_samples, "random finite-difference probes");
    losscheck->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        Settings settings;
        if (config_path.empty())
            if (const char* env = std::getenv("WEBNAV_CONFIG")) config_path = env;
        if (!config_path.empty()) {
            try {
                settings.config = json::parse(read_file(config_path));
            } catch (const json::exception& e) {
                throw SchemaError(std::string("config: ") + e.what());
            }
        }

        if (*prune) return cmd_prune(settings, prune_input, prune_flags, id_map_path);

        if (*run) {
            auto options = episode_options(settings, run_pruner, run_steps_opt, run_steps, run_cap_opt, run_cap);
            std::unique_ptr<Policy> policy;
            if (!script_path.empty())
                policy = std::make_unique<ScriptedPolicy>(read_lines(script_path), false, "script");
            else
                policy = run_policy.http(settings);
            WebDriverOptions wd;
            wd.endpoint = settings.pick(browser_opt, browser_url, "WEBNAV_BROWSER_URL", "browser.url", std::string());
            if (wd.endpoint.empty()) throw UsageError("no browser endpoint; pass --browser or set WEBNAV_BROWSER_URL");
            if (settings.config.contains("browser") && settings.config["browser"].contains("capabilities"))
                wd.capabilities = settings.config["browser"]["capabilities"];
            if (interactive)
                options.user_input = [](const std::string& message) -> std::optional<std::string> {
                    std::cerr << message << "\n> " << std::flush;
                    std::string line;
                    if (!std::getline(std::cin, line)) return std::nullopt;
                    return line;
                };
            auto session = std::make_shared<WebDriverSession>(wd);
            BrowserEnvironment env(session, start_url);
            Trace trace = run_episode(env, *policy, task, options);
            Sink sink(run_out, true);
            sink.out() << trace_to_json_line(trace) << '\n';
            std::cerr << "outcome " << to_string(trace.outcome.kind) << " after " << trace.steps.size() << " steps"
                      << (trace.outcome.detail.empty() ? "" : ": " + trace.outcome.detail) << '\n';
            return exit_for(trace.outcome);
        }

        if (*replay) {
            EpisodeOptions options;
            options.history_cap = settings.pick(replay_cap_opt, replay_cap, nullptr, "history_cap", kDefaultHistoryCap);
            return cmd_replay(replay_in, replay_out, options);
        }

        if (*eval) {
            auto traces = read_trace_file(bench_path);
            SplitSpec spec;
            if (!split_path.empty()) spec = parse_split_spec(read_file(split_path));
            std::unique_ptr<Policy> policy;
            if (policy_kind == "oracle")
                policy = std::make_unique<LookupPolicy>(gold_completions(traces));
            else if (policy_kind.rfind("const:", 0) == 0)
                policy = std::make_unique<ConstantPolicy>(policy_kind.substr(6));
            else if (policy_kind.rfind("script:", 0) == 0)
                policy = std::make_unique<ScriptedPolicy>(read_lines(policy_kind.substr(7)), false, "script");
            else if (policy_kind == "http")
                policy = eval_policy.http(settings);
            else
                throw UsageError("unknown policy '" + policy_kind + "'");
            EvaluateOptions eo;
            eo.workers = settings.pick(workers_opt, workers, "WEBNAV_WORKERS", "workers", std::size_t{1});
            // Scripted answers are consumed in order, so they need a single worker.
            if (policy_kind.rfind("script:", 0) == 0) eo.workers = 1;
            BenchReport report = evaluate(traces, *policy, spec, eo);
            std::cout << report_to_table(report);
            if (!report_path.empty()) {
                Sink sink(report_path);
                sink.out() << report_to_json(report) << '\n';
            }
            // Every call failing means the backend is down, not that the model is wrong.
            if (report.overall.steps > 0 && report.overall.policy_errors == report.overall.steps) {
                std::cerr << "webnav: every policy call failed\n";
                return kBackend;
            }
            return kOk;
        }

        if (*pairs) {
            std::vector<SampleSet> sets;
            for (const auto& line : read_lines(samples_path)) sets.push_back(sample_set_from_json_line(line));
            auto out = filter_preference_pairs(sets);
            Sink sink(pairs_out);
            for (const auto& p : out) sink.out() << pair_to_json_line(p) << '\n';
            std::cerr << out.size() << " pairs from " << sets.size() << " sample sets\n";
            return kOk;
        }

        if (*rft) {
            auto traces = read_trace_file(rft_in);
            auto kept = select_rft_traces(traces, make_adjudicator(adjudicator));
            Sink sink(rft_out);
            write_traces(sink.out(), kept);
            std::cerr << kept.size() << " of " << traces.size() << " traces kept\n";
            return kOk;
        }

        if (*losscheck) {
            double b = settings.pick(beta_opt, beta, nullptr, "loss.beta", kDefaultBeta);
            double l = settings.pick(lambda_opt, lambda, nullptr, "loss.lambda", kDefaultLambda);
            std::string m = settings.pick(mode_opt, mode_name, nullptr, "loss.mode", std::string("dpo-weighted"));
            if (m != "dpo-weighted" && m != "sft-weighted")
                throw UsageError("loss mode must be dpo-weighted or sft-weighted");
            auto mode = m == "dpo-weighted" ? LossMode::DpoWeighted : LossMode::SftWeighted;
            return cmd_losscheck(b, l, mode, fd_samples, seed);
        }
    } catch (const Error& e) {
        std::cerr << "webnav: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "webnav: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
