#pragma once

#include "webnav/dom.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>

namespace webnav {

struct Radii {
    int depth = 0;
    int children = 0;
    int siblings = 0;

    bool operator==(const Radii&) const = default;
};

struct PrunerConfig;

// Maps a round number to the neighborhood radii used in that round.
using ShrinkSchedule = std::function<Radii(int round, const PrunerConfig& cfg)>;

struct PrunerConfig {
    int max_depth = 4;
    int max_children = 6;
    int max_siblings = 2;
    int recursion_count = 1;
    // Opt-in: later rounds expand around everything collected so far rather
    // than the original kept set.
    bool reseed = false;
    ShrinkSchedule shrink;  // empty means shrink_default

    Radii base() const { return {max_depth, max_children, max_siblings}; }
    Radii radii(int round) const;
};

// Throws InvalidConfig on negative radii, rcc < 1, or a schedule that is not
// monotone non-increasing or does not start at the base radii.
void check_config(const PrunerConfig& cfg);

// Round 0 returns the base radii; later rounds shrink depth and siblings by
// one per round and halve the child budget (never below 1 unless it was 0).
Radii shrink_default(int round, const PrunerConfig& cfg);

struct SimplifiedHtml {
    std::string text;
    std::map<int, int> id_map;  // operable_id -> node_index in the source tree
    std::size_t token_estimate = 0;

    bool operator==(const SimplifiedHtml&) const = default;
};

// The seed, up to `depth` ancestors, descendants down to `depth` levels with
// at most `children` children taken per node, and up to `siblings` nearest
// siblings on each side. Throws UnknownNode.
std::set<int> expand_neighborhood(const DomTree& tree, int seed, int depth, int children, int siblings);

// Union of all round neighborhoods around `kept` (the candidate set).
std::set<int> candidate_set(const DomTree& tree, const std::set<int>& kept, const PrunerConfig& cfg);

// Deletes every non-candidate node and every candidate without text or
// attributes that has at most one child, bottom-up, splicing surviving
// children into the parent. The root always survives.
DomTree prune(const DomTree& tree, const std::set<int>& kept, const PrunerConfig& cfg);

SimplifiedHtml serialize_simplified(const DomTree& tree);

// kept_set + prune + serialize_simplified on a tree whose operable ids are
// already assigned.
SimplifiedHtml simplify_page(const DomTree& tree, const PrunerConfig& cfg);

}  // namespace webnav
