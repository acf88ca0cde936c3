#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace webnav {

struct Rect {
    double x = 0;
    double y = 0;
    double width = 0;
    double height = 0;

    bool operator==(const Rect&) const = default;
};

using Attribute = std::pair<std::string, std::string>;

// One element of a parsed page. Text nodes are not materialized; the
// visible text directly owned by an element is kept in `text`.
struct DomNode {
    std::string tag;
    std::vector<Attribute> attributes;  // source order, names lowercase
    std::string text;                   // whitespace-normalized
    std::vector<DomNode> children;
    int node_index = 0;                 // pre-order position in the source document
    std::optional<int> operable_id;
    std::optional<Rect> bounds;
    // Known only in live mode. Hidden nodes never enter the kept set.
    std::optional<bool> visible;

    const std::string* attribute(std::string_view name) const;
    bool has_attribute(std::string_view name) const { return attribute(name) != nullptr; }

    bool operator==(const DomNode&) const = default;
};

struct DomTree {
    DomNode root;
    std::string source_url;
    std::optional<std::string> title;

    bool operator==(const DomTree&) const = default;
};

struct Tab {
    std::string title;
    std::string url;
    bool is_current = false;

    bool operator==(const Tab&) const = default;
};

struct PageState {
    DomTree tree;
    std::string url;
    double scroll_y = 0;
    double viewport_height = 0;
    double page_height = 0;
    std::vector<Tab> tabs;

    bool operator==(const PageState&) const = default;
};

// Throws InvalidConfig when the scroll/viewport/tab invariants are broken.
void check_page_state(const PageState& state);

// Lenient HTML parse. Never fails except on empty input (EmptyDocument).
// The root is always an `html` element; node indices are assigned in
// pre-order starting at 0.
DomTree parse_html(std::string_view text);

// Operability predicate used by detect_operable.
bool is_operable(const DomNode& node);

// Clears and reassigns operable ids in pre-order. Idempotent.
DomTree detect_operable(DomTree tree);

// node_index of every operable node plus every node with non-empty text.
std::set<int> kept_set(const DomTree& tree);

// operable_id -> node_index for every operable node in the tree.
std::map<int, int> operable_index(const DomTree& tree);

// Sets operable ids from numeric `id` attributes, as emitted by
// serialize_simplified. Used when a simplified page is re-read.
DomTree adopt_serialized_ids(DomTree tree);

// Reassigns node_index in pre-order from 0.
void renumber(DomTree& tree);

void for_each_preorder(const DomNode& root, const std::function<void(const DomNode&)>& fn);
void for_each_preorder(DomNode& root, const std::function<void(DomNode&)>& fn);

const DomNode* find_node(const DomTree& tree, int node_index);
std::size_t node_count(const DomTree& tree);

// Child-index path from the root to `node_index`, or nullopt when absent.
std::optional<std::vector<int>> child_path(const DomTree& tree, int node_index);

// Flat, pre-order view of a tree with parent links. Positions are indices
// into `nodes`; the root is position 0.
class FlatTree {
public:
    struct Entry {
        const DomNode* node = nullptr;
        int parent = -1;
        int depth = 0;
        std::vector<int> children;
        int sibling_rank = 0;  // index within parent's children
    };

    explicit FlatTree(const DomTree& tree);

    std::size_t size() const { return nodes_.size(); }
    const Entry& operator[](int pos) const { return nodes_[static_cast<std::size_t>(pos)]; }
    std::optional<int> position_of(int node_index) const;

private:
    std::vector<Entry> nodes_;
    std::unordered_map<int, int> position_;
};

}  // namespace webnav
