#pragma once

#include "webnav/errors.hpp"
#include "webnav/policy.hpp"

#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace testsupport {

// Operable id of the element whose markup contains `needle`, read from a
// rendered prompt.
inline std::string id_of(const std::string& prompt, const std::string& needle) {
    auto at = prompt.find(needle);
    if (at == std::string::npos) throw webnav::PolicyError("'" + needle + "' not on the page");
    auto id = prompt.rfind(" id=\"", at);
    if (id == std::string::npos) throw webnav::PolicyError("no element before '" + needle + "'");
    id += 5;
    return prompt.substr(id, prompt.find('"', id) - id);
}

// Each call answers with the next step function applied to the prompt.
class StepPolicy : public webnav::Policy {
public:
    using Step = std::function<std::string(const std::string& prompt)>;

    explicit StepPolicy(std::vector<Step> steps) : steps_(std::move(steps)) {}

    std::string complete(const std::string& prompt) override {
        std::lock_guard lock(mutex_);
        if (next_ >= steps_.size()) throw webnav::PolicyError("out of steps");
        return steps_[next_++](prompt);
    }
    std::string identity() const override { return "steps"; }

private:
    std::vector<Step> steps_;
    std::size_t next_ = 0;
    std::mutex mutex_;
};

inline StepPolicy::Step say(std::string text) {
    return [text = std::move(text)](const std::string&) { return text; };
}

// Seven completions that add headphones to the cart on the shop site.
inline std::vector<StepPolicy::Step> shop_script() {
    return {
        [](const std::string& p) {
            return "type_string(element_id=\"" + id_of(p, "placeholder=\"Search products\"") +
                   "\", content=\"headphones\", press_enter=False) # search box first";
        },
        [](const std::string& p) { return "click(element_id=\"" + id_of(p, ">Deals<") + "\") # deals may list it"; },
        [](const std::string&) { return std::string("scroll_page(direction=\"down\")"); },
        [](const std::string& p) {
            return "Looking at the list.\nclick(element_id=\"" + id_of(p, ">Wireless headphones<") +
                   "\") # the product";
        },
        [](const std::string& p) {
            return "type_string(element_id=\"" + id_of(p, "name=\"qty\"") + "\", content=\"2\", press_enter=False)";
        },
        [](const std::string& p) { return "click(element_id=\"" + id_of(p, ">Add to cart<") + "\") # add"; },
        [](const std::string&) { return std::string("finish(answer=\"Added 2 wireless headphones\")"); },
    };
}

}  // namespace testsupport
