#pragma once

#include "webnav/dom.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace webnav {

enum class ScrollDirection { Up, Down };
enum class GoDirection { Forward, Backward };

namespace cmd {

struct Click {
    std::string element_id;
    bool operator==(const Click&) const = default;
};
struct Hover {
    std::string element_id;
    bool operator==(const Hover&) const = default;
};
struct Select {
    std::string element_id;
    std::string option;
    bool operator==(const Select&) const = default;
};
struct TypeString {
    std::string element_id;
    std::string content;
    bool press_enter = false;
    bool operator==(const TypeString&) const = default;
};
struct ScrollPage {
    ScrollDirection direction = ScrollDirection::Down;
    bool operator==(const ScrollPage&) const = default;
};
struct Go {
    GoDirection direction = GoDirection::Backward;
    bool operator==(const Go&) const = default;
};
struct JumpTo {
    std::string url;
    bool new_tab = false;
    bool operator==(const JumpTo&) const = default;
};
struct SwitchTab {
    std::int64_t tab_index = 0;
    bool operator==(const SwitchTab&) const = default;
};
struct UserInput {
    std::string message;
    bool operator==(const UserInput&) const = default;
};
struct Finish {
    std::optional<std::string> answer;
    bool operator==(const Finish&) const = default;
};

}  // namespace cmd

using Command = std::variant<cmd::Click, cmd::Hover, cmd::Select, cmd::TypeString, cmd::ScrollPage,
                             cmd::Go, cmd::JumpTo, cmd::SwitchTab, cmd::UserInput, cmd::Finish>;

struct Action {
    Command command;
    std::optional<std::string> comment;

    bool operator==(const Action&) const = default;

    template <class T>
    bool is() const { return std::holds_alternative<T>(command); }
    template <class T>
    const T* get() const { return std::get_if<T>(&command); }
};

// Function name as the model writes it, e.g. "type_string".
std::string_view command_name(const Command& command);
inline std::string_view command_name(const Action& action) { return command_name(action.command); }

// Target element id for Click/Hover/Select/TypeString.
std::optional<std::string_view> target_element(const Action& action);

struct ParseDiagnostic {
    enum class Kind { UnknownFunction, ArityError, TypeError, UnparsableLine, MultipleCommands };

    Kind kind = Kind::UnparsableLine;
    std::size_t begin = 0;  // byte range [begin, end) in the input
    std::size_t end = 0;
    std::string detail;

    bool operator==(const ParseDiagnostic&) const = default;
};

std::string_view to_string(ParseDiagnostic::Kind kind);

using ParseResult = std::variant<Action, ParseDiagnostic>;

// Extracts the single command from free-form model output. Total: every
// input yields either an Action or a diagnostic.
ParseResult parse_action(std::string_view text);

// Canonical single-line form with keyword arguments, including a trailing
// `# comment` when the action carries one.
std::string to_command_string(const Action& action);

// Same, without the comment.
std::string to_command_string(const Command& command);

// Python-style string literal using double quotes.
std::string quote_string(std::string_view s);

struct ValidationError {
    enum class Kind { UnknownElementId, IllegalSelectTarget, UnknownOption, IllegalTypeTarget,
                      TabIndexOutOfRange, InvalidUrl };

    Kind kind;
    std::string detail;

    bool operator==(const ValidationError&) const = default;
};

std::string_view to_string(ValidationError::Kind kind);

// Checks an action against the page it answers. `id_map` maps operable ids
// to node indices of `state.tree`. An empty result means the action is
// safe to dispatch.
std::vector<ValidationError> validate(const Action& action, const PageState& state,
                                      const std::map<int, int>& id_map);

}  // namespace webnav
