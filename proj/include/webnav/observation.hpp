#pragma once

#include "webnav/action.hpp"
#include "webnav/dom.hpp"
#include "webnav/pruner.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace webnav {

// Scroll position and page size in viewport heights, kept in tenths so the
// one-decimal rendering is exact.
struct ViewportPages {
    int current_tenths = 0;
    int max_tenths = 10;

    std::string current() const;
    std::string max() const;

    bool operator==(const ViewportPages&) const = default;
};

// Rounds half-up to one decimal. Throws NonPositiveViewport.
ViewportPages compute_viewport_pages(double scroll_y, double viewport_height, double page_height);

struct TabEntry {
    int index = 0;
    std::string title;
    bool is_current = false;

    bool operator==(const TabEntry&) const = default;
};

std::vector<TabEntry> tab_entries(const std::vector<Tab>& tabs);

struct Observation {
    std::string task;
    SimplifiedHtml simplified_html;
    std::vector<TabEntry> tabs;
    ViewportPages viewport;
    std::vector<std::string> previous_commands;

    bool operator==(const Observation&) const = default;
};

inline constexpr std::size_t kDefaultHistoryCap = 8;

struct History {
    std::vector<std::string> commands;
    std::size_t cap = kDefaultHistoryCap;

    bool operator==(const History&) const = default;
};

// Appends the canonical command string, dropping the oldest entry once the
// cap is exceeded.
History update_history(History history, const Action& action);

// `['a', 'b']`, quoting each entry the way Python's str(list) does.
std::string render_command_list(const std::vector<std::string>& commands);

// `*0: Title, 1: Other` with the current tab starred.
std::string render_tabs(const std::vector<TabEntry>& tabs);

// The agent prompt with every placeholder filled in.
std::string render_prompt(const Observation& obs);

}  // namespace webnav
