#include "literal_pruner.hpp"

#include <algorithm>
#include <memory>
#include <vector>

namespace oracle {

namespace {

struct Node {
    int id = 0;
    bool has_text = false;
    bool has_attrib = false;
    Node* parent = nullptr;
    std::vector<Node*> children;
};

struct Tree {
    std::vector<std::unique_ptr<Node>> storage;
    Node* root = nullptr;

    Node* copy(const webnav::DomNode& src, Node* parent) {
        storage.push_back(std::make_unique<Node>());
        Node* n = storage.back().get();
        n->id = src.node_index;
        n->has_text = !src.text.empty();
        n->has_attrib = !src.attributes.empty() || src.operable_id.has_value();
        n->parent = parent;
        for (const auto& c : src.children) n->children.push_back(copy(c, n));
        return n;
    }

    void order(Node* n, std::vector<Node*>& out) {
        out.push_back(n);
        for (Node* c : n->children) order(c, out);
    }

    std::vector<Node*> all() {
        std::vector<Node*> out;
        order(root, out);
        return out;
    }

    Node* element(int id) {
        for (Node* n : all())
            if (n->id == id) return n;
        return nullptr;
    }

    // Children move into the parent at the removed node's position.
    void remove(Node* n) {
        Node* p = n->parent;
        auto& sibs = p->children;
        auto at = std::find(sibs.begin(), sibs.end(), n);
        at = sibs.erase(at);
        for (Node* c : n->children) c->parent = p;
        sibs.insert(at, n->children.begin(), n->children.end());
        n->children.clear();
    }
};

std::vector<Node*> get_ancestors(Node* node, int d) {
    std::vector<Node*> out;
    Node* cur = node->parent;
    for (int i = 0; i < d && cur; ++i) {
        out.push_back(cur);
        cur = cur->parent;
    }
    return out;
}

std::vector<Node*> get_descendants(Node* node, int d, int mc) {
    std::vector<Node*> out;
    if (d <= 0) return out;
    int taken = 0;
    for (Node* c : node->children) {
        if (taken++ >= mc) break;
        out.push_back(c);
        auto deeper = get_descendants(c, d - 1, mc);
        out.insert(out.end(), deeper.begin(), deeper.end());
    }
    return out;
}

std::vector<Node*> get_siblings(Node* node, int ms) {
    std::vector<Node*> out;
    if (!node->parent) return out;
    const auto& sibs = node->parent->children;
    int i = static_cast<int>(std::find(sibs.begin(), sibs.end(), node) - sibs.begin());
    for (int j = i - ms; j < i; ++j)
        if (j >= 0) out.push_back(sibs[static_cast<std::size_t>(j)]);
    for (int j = i + 1; j <= i + ms && j < static_cast<int>(sibs.size()); ++j)
        out.push_back(sibs[static_cast<std::size_t>(j)]);
    return out;
}

// "make them smaller"
void update(int& d, int& mc, int& ms) {
    d = std::max(0, d - 1);
    mc = mc == 0 ? 0 : std::max(1, (mc + 1) / 2);
    ms = std::max(0, ms - 1);
}

void canon(const Node* n, std::string& out) {
    out += std::to_string(n->id);
    if (n->children.empty()) return;
    out += "(";
    for (std::size_t i = 0; i < n->children.size(); ++i) {
        if (i) out += " ";
        canon(n->children[i], out);
    }
    out += ")";
}

void canon(const webnav::DomNode& n, std::string& out) {
    out += std::to_string(n.node_index);
    if (n.children.empty()) return;
    out += "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += " ";
        canon(n.children[i], out);
    }
    out += ")";
}

}  // namespace

std::string literal_prune(const webnav::DomTree& source, const std::set<int>& kept, int rcc, int d, int mc, int ms) {
    Tree tree;
    tree.root = tree.copy(source.root, nullptr);

    std::vector<Node*> nodes;
    auto append = [&](const std::vector<Node*>& more) { nodes.insert(nodes.end(), more.begin(), more.end()); };
    for (int t = 0; t < rcc; ++t) {
        for (int id : kept) {
            Node* node = tree.element(id);
            nodes.push_back(node);
            append(get_ancestors(node, d));
            append(get_descendants(node, d, mc));
            append(get_siblings(node, ms));
        }
        update(d, mc, ms);
    }

    auto snapshot = tree.all();
    for (auto it = snapshot.rbegin(); it != snapshot.rend(); ++it) {
        Node* node = *it;
        bool is_root = node == tree.root;
        if (is_root) continue;
        bool in_nodes = std::find(nodes.begin(), nodes.end(), node) != nodes.end();
        if (!in_nodes || !(node->has_text || node->has_attrib || node->children.size() > 1 || is_root))
            tree.remove(node);
    }

    std::string out;
    canon(tree.root, out);
    return out;
}

std::string canonical(const webnav::DomTree& tree) {
    std::string out;
    canon(tree.root, out);
    return out;
}

}  // namespace oracle
