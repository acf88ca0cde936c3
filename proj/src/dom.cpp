#include "webnav/dom.hpp"
#include "webnav/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace webnav {

const std::string* DomNode::attribute(std::string_view name) const {
    for (const auto& [key, value] : attributes) {
        if (key == name) return &value;
    }
    return nullptr;
}

void check_page_state(const PageState& state) {
    if (!(state.viewport_height > 0)) throw InvalidConfig("viewport_height must be positive");
    if (state.scroll_y < 0) throw InvalidConfig("scroll_y must be non-negative");
    double max_scroll = std::max(0.0, state.page_height - state.viewport_height);
    if (state.scroll_y > max_scroll + 0.5) throw InvalidConfig("scroll_y beyond the end of the page");
    auto current = std::count_if(state.tabs.begin(), state.tabs.end(),
                                 [](const Tab& t) { return t.is_current; });
    if (current != 1) throw InvalidConfig("exactly one tab must be current");
}

void for_each_preorder(const DomNode& root, const std::function<void(const DomNode&)>& fn) {
    fn(root);
    for (const auto& child : root.children) for_each_preorder(child, fn);
}

void for_each_preorder(DomNode& root, const std::function<void(DomNode&)>& fn) {
    fn(root);
    for (auto& child : root.children) for_each_preorder(child, fn);
}

void renumber(DomTree& tree) {
    int next = 0;
    for_each_preorder(tree.root, [&](DomNode& n) { n.node_index = next++; });
}

namespace {

std::optional<long> parse_long(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

}  // namespace

bool is_operable(const DomNode& node) {
    static const std::set<std::string, std::less<>> kTags = {
        "a", "button", "input", "textarea", "select", "option", "label", "summary"};
    if (kTags.count(node.tag)) return true;
    if (node.has_attribute("onclick")) return true;
    if (const auto* role = node.attribute("role"); role && (*role == "button" || *role == "link"))
        return true;
    if (const auto* editable = node.attribute("contenteditable"); editable && *editable != "false")
        return true;
    if (const auto* tabindex = node.attribute("tabindex")) {
        auto value = parse_long(*tabindex);
        if (value && *value >= 0) return true;
    }
    return false;
}

DomTree detect_operable(DomTree tree) {
    int next = 0;
    for_each_preorder(tree.root, [&](DomNode& n) {
        n.operable_id.reset();
        if (is_operable(n)) n.operable_id = next++;
    });
    return tree;
}

std::set<int> kept_set(const DomTree& tree) {
    std::set<int> kept;
    for_each_preorder(tree.root, [&](const DomNode& n) {
        if (n.visible == false) return;
        if (n.operable_id || !n.text.empty()) kept.insert(n.node_index);
    });
    return kept;
}

std::map<int, int> operable_index(const DomTree& tree) {
    std::map<int, int> ids;
    for_each_preorder(tree.root, [&](const DomNode& n) {
        if (n.operable_id) ids.emplace(*n.operable_id, n.node_index);
    });
    return ids;
}

DomTree adopt_serialized_ids(DomTree tree) {
    for_each_preorder(tree.root, [](DomNode& n) {
        n.operable_id.reset();
        if (const auto* id = n.attribute("id")) {
            auto value = parse_long(*id);
            if (value && *value >= 0 && std::to_string(*value) == *id)
                n.operable_id = static_cast<int>(*value);
        }
    });
    return tree;
}

const DomNode* find_node(const DomTree& tree, int node_index) {
    const DomNode* cursor = &tree.root;
    // Pre-order indices let us descend without visiting every node.
    while (cursor) {
        if (cursor->node_index == node_index) return cursor;
        const DomNode* next = nullptr;
        for (const auto& child : cursor->children) {
            if (child.node_index > node_index) break;
            next = &child;
        }
        cursor = next;
    }
    return nullptr;
}

std::optional<std::vector<int>> child_path(const DomTree& tree, int node_index) {
    std::vector<int> path;
    const DomNode* cursor = &tree.root;
    while (cursor) {
        if (cursor->node_index == node_index) return path;
        const DomNode* next = nullptr;
        int rank = -1;
        for (std::size_t i = 0; i < cursor->children.size(); ++i) {
            if (cursor->children[i].node_index > node_index) break;
            next = &cursor->children[i];
            rank = static_cast<int>(i);
        }
        if (next) path.push_back(rank);
        cursor = next;
    }
    return std::nullopt;
}

std::size_t node_count(const DomTree& tree) {
    std::size_t count = 0;
    for_each_preorder(tree.root, [&](const DomNode&) { ++count; });
    return count;
}

FlatTree::FlatTree(const DomTree& tree) {
    struct Frame {
        const DomNode* node;
        int parent;
        int depth;
        int rank;
    };
    std::vector<Frame> stack{{&tree.root, -1, 0, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        int pos = static_cast<int>(nodes_.size());
        nodes_.push_back(Entry{f.node, f.parent, f.depth, {}, f.rank});
        position_.emplace(f.node->node_index, pos);
        if (f.parent >= 0) nodes_[static_cast<std::size_t>(f.parent)].children.push_back(pos);
        for (std::size_t i = f.node->children.size(); i-- > 0;)
            stack.push_back({&f.node->children[i], pos, f.depth + 1, static_cast<int>(i)});
    }
}

std::optional<int> FlatTree::position_of(int node_index) const {
    auto it = position_.find(node_index);
    if (it == position_.end()) return std::nullopt;
    return it->second;
}

}  // namespace webnav
