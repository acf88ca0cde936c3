#include "webnav/pruner.hpp"
#include "webnav/errors.hpp"

#include <algorithm>
#include <array>
#include <string_view>
#include <vector>

namespace webnav {

Radii shrink_default(int round, const PrunerConfig& cfg) {
    Radii base = cfg.base();
    if (round <= 0) return base;
    int mc = base.children;
    if (mc > 0) {
        // ceil(mc / 2^round), saturating once the shift exceeds the width
        int shifted = round >= 30 ? 1 : (mc + (1 << round) - 1) >> round;
        mc = std::min(mc, std::max(1, shifted));
    }
    return {std::max(0, base.depth - round), mc, std::max(0, base.siblings - round)};
}

Radii PrunerConfig::radii(int round) const {
    return shrink ? shrink(round, *this) : shrink_default(round, *this);
}

void check_config(const PrunerConfig& cfg) {
    if (cfg.max_depth < 0 || cfg.max_children < 0 || cfg.max_siblings < 0)
        throw InvalidConfig("pruner radii must be non-negative");
    if (cfg.recursion_count < 1) throw InvalidConfig("recursion_count must be at least 1");
    Radii prev = cfg.radii(0);
    if (prev != cfg.base()) throw InvalidConfig("round 0 must use the configured radii");
    for (int t = 1; t < cfg.recursion_count; ++t) {
        Radii r = cfg.radii(t);
        if (r.depth > prev.depth || r.children > prev.children || r.siblings > prev.siblings ||
            r.depth < 0 || r.children < 0 || r.siblings < 0)
            throw InvalidConfig("shrink schedule must be monotone non-increasing");
        prev = r;
    }
}

namespace {

void add_neighborhood(const FlatTree& flat, int pos, const Radii& r, std::vector<char>& out) {
    out[static_cast<std::size_t>(pos)] = 1;

    int up = flat[pos].parent;
    for (int level = 0; level < r.depth && up >= 0; ++level) {
        out[static_cast<std::size_t>(up)] = 1;
        up = flat[up].parent;
    }

    std::vector<int> frontier{pos};
    for (int level = 0; level < r.depth && !frontier.empty(); ++level) {
        std::vector<int> next;
        for (int p : frontier) {
            const auto& kids = flat[p].children;
            std::size_t take = std::min(kids.size(), static_cast<std::size_t>(r.children));
            for (std::size_t i = 0; i < take; ++i) {
                out[static_cast<std::size_t>(kids[i])] = 1;
                next.push_back(kids[i]);
            }
        }
        frontier = std::move(next);
    }

    if (int parent = flat[pos].parent; parent >= 0) {
        const auto& sibs = flat[parent].children;
        int rank = flat[pos].sibling_rank;
        int lo = std::max(0, rank - r.siblings);
        int hi = std::min(static_cast<int>(sibs.size()) - 1, rank + r.siblings);
        for (int i = lo; i <= hi; ++i) out[static_cast<std::size_t>(sibs[static_cast<std::size_t>(i)])] = 1;
    }
}

int require_position(const FlatTree& flat, int node_index) {
    auto pos = flat.position_of(node_index);
    if (!pos) throw UnknownNode("no node with index " + std::to_string(node_index));
    return *pos;
}

std::vector<char> candidate_mask(const FlatTree& flat, const std::set<int>& kept, const PrunerConfig& cfg) {
    check_config(cfg);
    std::vector<int> seeds;
    seeds.reserve(kept.size());
    for (int id : kept) seeds.push_back(require_position(flat, id));

    std::vector<char> mask(flat.size(), 0);
    for (int t = 0; t < cfg.recursion_count; ++t) {
        Radii r = cfg.radii(t);
        if (cfg.reseed && t > 0) {
            seeds.clear();
            for (std::size_t p = 0; p < mask.size(); ++p)
                if (mask[p]) seeds.push_back(static_cast<int>(p));
        }
        for (int pos : seeds) add_neighborhood(flat, pos, r, mask);
    }
    return mask;
}

bool has_text_or_attrib(const DomNode& n) {
    return !n.text.empty() || !n.attributes.empty() || n.operable_id.has_value();
}

DomNode rebuild(const FlatTree& flat, const std::vector<std::vector<int>>& kids, int pos) {
    const DomNode& src = *flat[pos].node;
    DomNode out;
    out.tag = src.tag;
    out.attributes = src.attributes;
    out.text = src.text;
    out.node_index = src.node_index;
    out.operable_id = src.operable_id;
    out.bounds = src.bounds;
    out.visible = src.visible;
    const auto& list = kids[static_cast<std::size_t>(pos)];
    out.children.reserve(list.size());
    for (int child : list) out.children.push_back(rebuild(flat, kids, child));
    return out;
}

}  // namespace

std::set<int> expand_neighborhood(const DomTree& tree, int seed, int depth, int children, int siblings) {
    FlatTree flat(tree);
    int pos = require_position(flat, seed);
    std::vector<char> mask(flat.size(), 0);
    add_neighborhood(flat, pos, {std::max(0, depth), std::max(0, children), std::max(0, siblings)}, mask);
    std::set<int> out;
    for (std::size_t p = 0; p < mask.size(); ++p)
        if (mask[p]) out.insert(flat[static_cast<int>(p)].node->node_index);
    return out;
}

std::set<int> candidate_set(const DomTree& tree, const std::set<int>& kept, const PrunerConfig& cfg) {
    FlatTree flat(tree);
    auto mask = candidate_mask(flat, kept, cfg);
    std::set<int> out;
    for (std::size_t p = 0; p < mask.size(); ++p)
        if (mask[p]) out.insert(flat[static_cast<int>(p)].node->node_index);
    return out;
}

DomTree prune(const DomTree& tree, const std::set<int>& kept, const PrunerConfig& cfg) {
    FlatTree flat(tree);
    auto mask = candidate_mask(flat, kept, cfg);

    // Current child lists; splicing rewrites the parent's list in place.
    std::vector<std::vector<int>> kids(flat.size());
    for (std::size_t p = 0; p < flat.size(); ++p) kids[p] = flat[static_cast<int>(p)].children;

    // Positions are pre-order, so walking them backwards visits every node
    // after all of its descendants.
    for (int pos = static_cast<int>(flat.size()) - 1; pos > 0; --pos) {
        const auto& mine = kids[static_cast<std::size_t>(pos)];
        bool keep = mask[static_cast<std::size_t>(pos)] &&
                    (has_text_or_attrib(*flat[pos].node) || mine.size() > 1);
        if (keep) continue;
        auto& siblings = kids[static_cast<std::size_t>(flat[pos].parent)];
        auto at = std::find(siblings.begin(), siblings.end(), pos);
        std::vector<int> moved = std::move(kids[static_cast<std::size_t>(pos)]);
        at = siblings.erase(at);
        siblings.insert(at, moved.begin(), moved.end());
    }

    DomTree out;
    out.source_url = tree.source_url;
    out.title = tree.title;
    out.root = rebuild(flat, kids, 0);
    return out;
}

namespace {

constexpr std::array<std::string_view, 11> kWhitelist = {
    "href", "type", "value", "name", "placeholder", "alt", "title", "role", "selected", "checked", "aria-label"};

bool whitelisted(std::string_view name) {
    return std::find(kWhitelist.begin(), kWhitelist.end(), name) != kWhitelist.end();
}

bool is_void_tag(std::string_view tag) {
    static constexpr std::array<std::string_view, 15> kVoid = {
        "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
        "param", "source", "track", "wbr", "keygen"};
    return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

// Not page content; never rendered.
bool is_skipped_tag(std::string_view tag) {
    return tag == "script" || tag == "style" || tag == "noscript" || tag == "template" ||
           tag == "meta" || tag == "link";
}

void escape_into(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += attribute ? ">" : "&gt;"; break;
            case '"': out += attribute ? "&quot;" : "\""; break;
            default: out.push_back(c);
        }
    }
}

void render(const DomNode& n, std::string& out, std::map<int, int>& ids) {
    if (is_skipped_tag(n.tag)) return;
    out.push_back('<');
    out += n.tag;
    if (n.operable_id) {
        out += " id=\"" + std::to_string(*n.operable_id) + "\"";
        ids.emplace(*n.operable_id, n.node_index);
    }
    for (const auto& [name, value] : n.attributes) {
        if (!whitelisted(name)) continue;
        out.push_back(' ');
        out += name;
        if (!value.empty()) {
            out += "=\"";
            escape_into(out, value, true);
            out.push_back('"');
        }
    }
    out.push_back('>');
    if (is_void_tag(n.tag) && n.text.empty() && n.children.empty()) return;
    escape_into(out, n.text, false);
    for (const auto& child : n.children) render(child, out, ids);
    out += "</" + n.tag + ">";
}

}  // namespace

SimplifiedHtml serialize_simplified(const DomTree& tree) {
    SimplifiedHtml out;
    // The prompt supplies the <html> wrapper itself.
    if (tree.root.tag == "html") {
        escape_into(out.text, tree.root.text, false);
        for (const auto& child : tree.root.children) render(child, out.text, out.id_map);
    } else {
        render(tree.root, out.text, out.id_map);
    }
    out.token_estimate = (out.text.size() + 3) / 4;
    return out;
}

SimplifiedHtml simplify_page(const DomTree& tree, const PrunerConfig& cfg) {
    return serialize_simplified(prune(tree, kept_set(tree), cfg));
}

}  // namespace webnav
