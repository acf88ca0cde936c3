#include "webnav/observation.hpp"
#include "webnav/errors.hpp"

#include <cmath>

namespace webnav {

namespace {

std::string tenths_to_string(int tenths) {
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

int round_half_up_tenths(double value) {
    return static_cast<int>(std::floor(value * 10.0 + 0.5));
}

constexpr const char* kInstructions =
    R"(You are a helpful assistant that can assist with web navigation tasks.
You are given a simplified html webpage and a task description.
Your goal is to complete the task. You can use the provided functions below to interact with the current webpage.

#Provided functions:
def click(element_id: str) -> None:
    """
    Click on the element with the specified id.

    Args:
       element_id: The id of the element.
    """

def hover(element_id: str) -> None:
    """
    Hover on the element with the specified id.

    Args:
       element_id: The id of the element.
    """

def select(element_id: str, option: str) -> None:
    """
    Select an option from a dropdown.

    Args:
       element_id: The id of the element.
       option: Value of the option to select.
    """

def type_string(element_id: str, content: str, press_enter: bool) -> None:
    """
    Type a string into the element with the specified id.

    Args:
       element_id: The id of the element.
       content: The string to type.
       press_enter: Whether to press enter after typing the string.
    """

def scroll_page(direction: Literal['up', 'down']) -> None:
    """
    Scroll down/up one page.

    Args:
       direction: The direction to scroll.
    """

def go(direction: Literal['forward', 'backward']) -> None:
    """
    Go forward/backward

    Args:
       direction: The direction to go to.
    """

def jump_to(url: str, new_tab: bool) -> None:
    """
    Jump to the specified url.

    Args:
       url: The url to jump to.
       new_tab: Whether to open the url in a new tab.
    """

def switch_tab(tab_index: int) -> None:
    """
    Switch to the specified tab.

    Args:
       tab_index: The index of the tab to switch to.
    """

def user_input(message: str) -> str:
    """
    Wait for user input.

    Args:
       message: The message to display to the user.

    Returns: The user input.
    """

def finish(answer: Optional[str]) -> None:
    """
    Finish the task (optionally with an answer).

    Args:
       answer: The answer to the task.
    """
)";

// The typo in "currrent" is part of the prompt the model was trained on.
constexpr const char* kClosing =
    "You should output one command to interact to the currrent webpage.\n"
    "You should add a brief comment to your command to explain your reasoning and thinking process.";

std::string python_repr(const std::string& s) {
    bool has_single = s.find('\'') != std::string::npos;
    bool has_double = s.find('"') != std::string::npos;
    char quote = (has_single && !has_double) ? '"' : '\'';
    std::string out(1, quote);
    for (char c : s) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c == quote) {
            out.push_back('\\');
            out.push_back(c);
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c == '\t') {
            out += "\\t";
        } else {
            out.push_back(c);
        }
    }
    out.push_back(quote);
    return out;
}

}  // namespace

std::string ViewportPages::current() const { return tenths_to_string(current_tenths); }
std::string ViewportPages::max() const { return tenths_to_string(max_tenths); }

ViewportPages compute_viewport_pages(double scroll_y, double viewport_height, double page_height) {
    if (!(viewport_height > 0)) throw NonPositiveViewport("viewport height must be positive");
    ViewportPages out;
    out.current_tenths = std::max(0, round_half_up_tenths(std::max(0.0, scroll_y) / viewport_height));
    out.max_tenths = std::max(10, round_half_up_tenths(page_height / viewport_height));
    return out;
}

std::vector<TabEntry> tab_entries(const std::vector<Tab>& tabs) {
    std::vector<TabEntry> out;
    out.reserve(tabs.size());
    for (std::size_t i = 0; i < tabs.size(); ++i)
        out.push_back({static_cast<int>(i), tabs[i].title, tabs[i].is_current});
    return out;
}

History update_history(History history, const Action& action) {
    history.commands.push_back(to_command_string(action));
    while (history.cap > 0 && history.commands.size() > history.cap)
        history.commands.erase(history.commands.begin());
    return history;
}

std::string render_command_list(const std::vector<std::string>& commands) {
    std::string out = "[";
    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (i) out += ", ";
        out += python_repr(commands[i]);
    }
    out += "]";
    return out;
}

std::string render_tabs(const std::vector<TabEntry>& tabs) {
    std::string out;
    for (std::size_t i = 0; i < tabs.size(); ++i) {
        if (i) out += ", ";
        if (tabs[i].is_current) out += "*";
        out += std::to_string(tabs[i].index) + ": " + tabs[i].title;
    }
    return out;
}

std::string render_prompt(const Observation& obs) {
    std::string out;
    out.reserve(obs.simplified_html.text.size() + 4096);
    out += "<html> ";
    out += obs.simplified_html.text;
    out += " </html>\n\n";
    out += kInstructions;
    out += "\n#Previous commands: ";
    out += render_command_list(obs.previous_commands);
    out += "\n\n#Window tabs: ";
    out += render_tabs(obs.tabs);
    out += "\n\n#Current viewport (pages): ";
    out += obs.viewport.current();
    out += " / ";
    out += obs.viewport.max();
    out += "\n\n#Task: ";
    out += obs.task;
    out += "\n\n";
    out += kClosing;
    return out;
}

}  // namespace webnav
