#include "webnav/policy.hpp"
#include "webnav/errors.hpp"

namespace webnav {

ScriptedPolicy::ScriptedPolicy(std::vector<std::string> completions, bool repeat_last, std::string identity)
    : completions_(std::move(completions)), repeat_last_(repeat_last), identity_(std::move(identity)) {}

std::string ScriptedPolicy::complete(const std::string&) {
    std::lock_guard lock(mutex_);
    if (next_ < completions_.size()) return completions_[next_++];
    if (repeat_last_ && !completions_.empty()) {
        ++next_;
        return completions_.back();
    }
    throw PolicyError("scripted policy exhausted after " + std::to_string(completions_.size()) + " completions");
}

std::size_t ScriptedPolicy::calls() const {
    std::lock_guard lock(mutex_);
    return next_;
}

std::string LookupPolicy::complete(const std::string& prompt) {
    auto it = table_.find(prompt);
    if (it == table_.end()) throw PolicyError("no completion recorded for this prompt");
    return it->second;
}

}  // namespace webnav
