#include "webnav/alignment.hpp"
#include "webnav/errors.hpp"

namespace webnav {

namespace {

constexpr std::string_view kRecognition = R"TPL(I want you to act as a Website Reader. Your objective is to explain a website's purpose and usage, given the website's text. Your explanation should cover all of the website's primary functions. DO NOT GUESS the purpose of the website, you SHOULD output "None" If you are not PRETTY sure about the purpose of the website. Note that you should only answer the purpose or usage within 20 words.

#Website Text#:
{html_content}

#Purpose#:

)TPL";

constexpr std::string_view kSimpleTask = R"TPL(HTML:
{html_content}

I want you to act as a task generator that can help generate Task-Operation pairs.
Based on the above HTML webpage, I will give you a specified operation. Your goal is to come up with a ONE-STEP task that the specified operation can solve.
Your answer SHOULD be in the following format:

Task: {Generated one-step task}

Operation: {The right operation to solve the task}

Intention: {The intention and thinking in your operation}

NOTICE: 
1. Your generated task should not be too SIMPLE, NAIVE
2. You can only do #type# on <input> and <textarea>
)TPL";

constexpr std::string_view kTraceIntent = R"TPL(User's overall task: {task_description}

User's actions: {annotated_action_trace}

Based on this information, deduce the intent behind each of the user's actions. Your response should be structured as follows:
Intent of Step 1: [Describe the intent of the user's first action from the user's first-person perspective]
Intent of Step 2: [Describe the intent of the user's second action from the user's first-person perspective]
... and so on.
Note: Your response should have the same number of lines as the number of user actions. The number of user actions in this task is {number_of_steps_in_action}.

)TPL";

std::string_view template_of(ConstructionPrompt kind) {
    switch (kind) {
        case ConstructionPrompt::Recognition: return kRecognition;
        case ConstructionPrompt::SimpleTask: return kSimpleTask;
        case ConstructionPrompt::TraceIntent: return kTraceIntent;
    }
    throw MissingField("unknown construction prompt");
}

}  // namespace

ConstructionPrompt parse_construction_kind(std::string_view name) {
    if (name == "recognition") return ConstructionPrompt::Recognition;
    if (name == "simple_task") return ConstructionPrompt::SimpleTask;
    if (name == "trace_intent") return ConstructionPrompt::TraceIntent;
    throw MissingField("unknown construction prompt '" + std::string(name) + "'");
}

std::vector<std::string> construction_fields(ConstructionPrompt kind) {
    if (kind == ConstructionPrompt::TraceIntent)
        return {"task_description", "annotated_action_trace", "number_of_steps_in_action"};
    return {"html_content"};
}

std::string render_construction_prompt(ConstructionPrompt kind, const std::map<std::string, std::string>& fields) {
    auto names = construction_fields(kind);
    for (const auto& name : names)
        if (!fields.count(name)) throw MissingField("construction prompt needs '" + name + "'");

    std::string_view tpl = template_of(kind);
    std::string out;
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        bool replaced = false;
        if (tpl[pos] == '{') {
            for (const auto& name : names) {
                std::string token = "{" + name + "}";
                if (tpl.substr(pos, token.size()) == token) {
                    out += fields.at(name);
                    pos += token.size();
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out += tpl[pos++];
    }
    return out;
}

std::string render_construction_prompt(std::string_view kind, const std::map<std::string, std::string>& fields) {
    return render_construction_prompt(parse_construction_kind(kind), fields);
}

}  // namespace webnav
