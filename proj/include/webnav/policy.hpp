#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace webnav {

// The text-completion backend that chooses actions. `complete` must be
// safe to call concurrently when used by the evaluator's worker pool.
// Failures surface as PolicyError.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string identity() const = 0;
};

// Returns the given completions in order. Once exhausted it repeats the
// last one, or throws PolicyError when `repeat_last` is false.
class ScriptedPolicy : public Policy {
public:
    explicit ScriptedPolicy(std::vector<std::string> completions, bool repeat_last = true,
                            std::string identity = "scripted");

    std::string complete(const std::string& prompt) override;
    std::string identity() const override { return identity_; }
    std::size_t calls() const;

private:
    std::vector<std::string> completions_;
    bool repeat_last_;
    std::string identity_;
    mutable std::mutex mutex_;
    std::size_t next_ = 0;
};

// Answers every prompt with the same completion.
class ConstantPolicy : public Policy {
public:
    explicit ConstantPolicy(std::string completion) : completion_(std::move(completion)) {}
    std::string complete(const std::string&) override { return completion_; }
    std::string identity() const override { return "const"; }

private:
    std::string completion_;
};

// Looks the prompt up in a fixed table; unknown prompts throw PolicyError.
// Built from gold traces, it yields the upper bound of any evaluation.
class LookupPolicy : public Policy {
public:
    explicit LookupPolicy(std::map<std::string, std::string> table, std::string identity = "oracle")
        : table_(std::move(table)), identity_(std::move(identity)) {}

    std::string complete(const std::string& prompt) override;
    std::string identity() const override { return identity_; }

private:
    std::map<std::string, std::string> table_;
    std::string identity_;
};

struct HttpPolicyOptions {
    std::string endpoint;  // absolute URL of the completion route
    std::string auth_token;
    int max_tokens = 256;
    std::vector<std::string> stop;
    std::chrono::milliseconds timeout{60000};
};

// POSTs {prompt, max_tokens, stop} as JSON and reads {text} back.
class HttpPolicy : public Policy {
public:
    explicit HttpPolicy(HttpPolicyOptions options);
    std::string complete(const std::string& prompt) override;
    std::string identity() const override { return "http:" + options_.endpoint; }

private:
    HttpPolicyOptions options_;
};

}  // namespace webnav
