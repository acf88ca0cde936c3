#include "oracles/literal_pruner.hpp"
#include "oracles/shapes.hpp"

#include "webnav/errors.hpp"
#include "webnav/pruner.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <regex>
#include <sstream>

using namespace webnav;

namespace {

// Independent membership test for one neighborhood, node by node.
bool in_neighborhood(const FlatTree& flat, int seed, int v, int d, int mc, int ms) {
    if (v == seed) return true;
    // ancestor within d levels
    int up = flat[seed].parent;
    for (int k = 1; up >= 0; ++k, up = flat[up].parent)
        if (up == v) return k <= d;
    // descendant whose path from the seed only uses the first mc children
    int cur = v, dist = 0;
    bool allowed = true;
    while (cur >= 0 && cur != seed) {
        if (flat[cur].sibling_rank >= mc) allowed = false;
        cur = flat[cur].parent;
        ++dist;
    }
    if (cur == seed) return allowed && dist <= d;
    // sibling within ms positions
    if (flat[v].parent >= 0 && flat[v].parent == flat[seed].parent)
        return std::abs(flat[v].sibling_rank - flat[seed].sibling_rank) <= ms;
    return false;
}

DomTree random_tree(std::mt19937& rng, int n) {
    DomTree t;
    t.root.tag = "html";
    std::vector<std::vector<int>> kids(static_cast<std::size_t>(n));
    for (int i = 1; i < n; ++i) kids[static_cast<std::size_t>(rng() % static_cast<unsigned>(i))].push_back(i);
    std::function<void(DomNode&, int)> build = [&](DomNode& node, int id) {
        if (rng() % 3 == 0) node.text = "t" + std::to_string(id);
        if (rng() % 4 == 0) node.attributes.emplace_back("class", "c");
        for (int k : kids[static_cast<std::size_t>(id)]) {
            node.children.emplace_back();
            node.children.back().tag = "div";
            build(node.children.back(), k);
        }
    };
    build(t.root, 0);
    renumber(t);
    return t;
}

std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PrunerConfig cfg_of(int d, int mc, int ms, int rcc = 1) {
    PrunerConfig c;
    c.max_depth = d;
    c.max_children = mc;
    c.max_siblings = ms;
    c.recursion_count = rcc;
    return c;
}

}  // namespace

TEST(Neighborhood, ChainOneAncestor) {
    auto t = oracle::tree_from_word("(())");
    EXPECT_EQ(expand_neighborhood(t, 2, 1, 1, 0), (std::set<int>{1, 2}));
}

TEST(Neighborhood, StarChildBudgetInOrder) {
    auto t = oracle::tree_from_word("()()()()()");
    EXPECT_EQ(expand_neighborhood(t, 0, 1, 2, 0), (std::set<int>{0, 1, 2}));
}

TEST(Neighborhood, BinaryTreeLeafMatchesBruteForce) {
    auto t = oracle::tree_from_word("((()())(()()))((()())(()()))");
    FlatTree flat(t);
    for (int seed = 0; seed < static_cast<int>(flat.size()); ++seed) {
        std::set<int> expected;
        for (int v = 0; v < static_cast<int>(flat.size()); ++v)
            if (in_neighborhood(flat, seed, v, 2, 2, 1)) expected.insert(v);
        EXPECT_EQ(expand_neighborhood(t, seed, 2, 2, 1), expected) << "seed " << seed;
    }
}

TEST(Neighborhood, RandomTreesMatchBruteForce) {
    std::mt19937 rng(11);
    for (int iter = 0; iter < 300; ++iter) {
        auto t = random_tree(rng, 2 + static_cast<int>(rng() % 30));
        FlatTree flat(t);
        int seed = static_cast<int>(rng() % flat.size());
        int d = static_cast<int>(rng() % 4), mc = static_cast<int>(rng() % 4), ms = static_cast<int>(rng() % 4);
        std::set<int> expected;
        for (int v = 0; v < static_cast<int>(flat.size()); ++v)
            if (in_neighborhood(flat, seed, v, d, mc, ms)) expected.insert(v);
        ASSERT_EQ(expand_neighborhood(t, seed, d, mc, ms), expected);
    }
}

TEST(Neighborhood, UnknownSeedThrows) {
    auto t = oracle::tree_from_word("()");
    EXPECT_THROW(expand_neighborhood(t, 5, 1, 1, 1), UnknownNode);
    EXPECT_THROW(prune(t, {7}, PrunerConfig{}), UnknownNode);
}

TEST(Shrink, DefaultSchedule) {
    auto c = cfg_of(4, 6, 2);
    EXPECT_EQ(shrink_default(0, c), (Radii{4, 6, 2}));
    EXPECT_EQ(shrink_default(1, c), (Radii{3, 3, 1}));
    EXPECT_EQ(shrink_default(3, cfg_of(2, 2, 1)), (Radii{0, 1, 0}));
    EXPECT_EQ(shrink_default(2, cfg_of(1, 0, 0)), (Radii{0, 0, 0}));
    EXPECT_EQ(shrink_default(40, cfg_of(3, 5, 3)), (Radii{0, 1, 0}));
}

TEST(Shrink, ConfigValidation) {
    EXPECT_THROW(check_config(cfg_of(-1, 1, 1)), InvalidConfig);
    EXPECT_THROW(check_config(cfg_of(1, 1, 1, 0)), InvalidConfig);
    auto growing = cfg_of(2, 2, 2, 2);
    growing.shrink = [](int round, const PrunerConfig& c) {
        return Radii{c.max_depth + round, c.max_children, c.max_siblings};
    };
    EXPECT_THROW(check_config(growing), InvalidConfig);
    auto offset = cfg_of(2, 2, 2, 1);
    offset.shrink = [](int, const PrunerConfig&) { return Radii{1, 1, 1}; };
    EXPECT_THROW(check_config(offset), InvalidConfig);
    EXPECT_NO_THROW(check_config(cfg_of(0, 0, 0, 3)));
}

TEST(Prune, RootOnlyTreeKeepsRoot) {
    auto t = parse_html("just text");
    auto out = prune(t, {}, PrunerConfig{});
    EXPECT_EQ(out.root.text, "just text");
    EXPECT_TRUE(out.root.children.empty());
}

TEST(Prune, NothingRemovableIsIdentity) {
    auto t = parse_html("<div>a<p>b<b>c</b><i>d</i></p><span>e</span></div><p>f</p>");
    t.root.text = "r";
    std::set<int> all;
    for_each_preorder(t.root, [&](const DomNode& n) { all.insert(n.node_index); });
    auto out = prune(t, all, cfg_of(10, 10, 10));
    EXPECT_EQ(out.root, t.root);
}

TEST(Prune, SixNodeFixture) {
    auto t = parse_html("<body><div><button>OK</button></div><span><em>x</em></span></body>");
    ASSERT_EQ(node_count(t), 6u);
    std::set<int> kept{3};
    auto out = prune(t, kept, cfg_of(2, 2, 1));
    EXPECT_EQ(oracle::canonical(out), oracle::literal_prune(t, kept, 1, 2, 2, 1));
    // Worked by hand: em and span fall outside the neighborhood, then div
    // and body are single-child chaff.
    EXPECT_EQ(oracle::canonical(out), "0(3)");
}

TEST(Prune, SpliceKeepsChildOrder) {
    auto t = parse_html("<div><p>a</p><div><p>b</p><p>c</p></div><p>d</p></div>");
    std::set<int> all;
    for_each_preorder(t.root, [&](const DomNode& n) { all.insert(n.node_index); });
    auto out = prune(t, all, cfg_of(5, 5, 5));
    EXPECT_EQ(oracle::canonical(out), "0(1(2 3(4 5) 6))");
    // Inner div has 2 children so it stays; a single-child wrapper goes.
    auto u = parse_html("<section><div><p>a</p></div><p>b</p></section>");
    std::set<int> all_u;
    for_each_preorder(u.root, [&](const DomNode& n) { all_u.insert(n.node_index); });
    EXPECT_EQ(oracle::canonical(prune(u, all_u, cfg_of(5, 5, 5))), "0(1(3 4))");
}

TEST(Prune, RandomTreesMatchLiteralInterpreter) {
    std::mt19937 rng(5);
    for (int iter = 0; iter < 2000; ++iter) {
        auto t = random_tree(rng, 1 + static_cast<int>(rng() % 40));
        std::set<int> kept;
        for (std::size_t i = 0; i < node_count(t); ++i)
            if (rng() % 4 == 0) kept.insert(static_cast<int>(i));
        int d = static_cast<int>(rng() % 5), mc = static_cast<int>(rng() % 5), ms = static_cast<int>(rng() % 4);
        int rcc = 1 + static_cast<int>(rng() % 3);
        auto out = prune(t, kept, cfg_of(d, mc, ms, rcc));
        ASSERT_EQ(oracle::canonical(out), oracle::literal_prune(t, kept, rcc, d, mc, ms)) << "iter " << iter;
    }
}

TEST(Prune, StructuralInvariants) {
    std::mt19937 rng(9);
    for (int iter = 0; iter < 500; ++iter) {
        auto t = random_tree(rng, 2 + static_cast<int>(rng() % 40));
        auto kept = kept_set(t);
        auto cfg = cfg_of(static_cast<int>(rng() % 4), static_cast<int>(rng() % 4), static_cast<int>(rng() % 3));
        auto out = prune(t, kept, cfg);
        FlatTree src(t), dst(out);
        auto candidates = candidate_set(t, kept, cfg);
        for (std::size_t p = 0; p < dst.size(); ++p) {
            int idx = dst[static_cast<int>(p)].node->node_index;
            auto sp = src.position_of(idx);
            ASSERT_TRUE(sp.has_value());
            // Every output ancestor was an input ancestor.
            for (int a = dst[static_cast<int>(p)].parent; a >= 0; a = dst[a].parent) {
                int anc = dst[a].node->node_index;
                bool found = false;
                for (int q = src[*sp].parent; q >= 0; q = src[q].parent)
                    found = found || src[q].node->node_index == anc;
                ASSERT_TRUE(found);
            }
        }
        // Kept nodes with content in the candidate set survive.
        for (int k : kept) {
            const DomNode* n = find_node(t, k);
            if (!n->text.empty() || !n->attributes.empty()) EXPECT_NE(find_node(out, k), nullptr);
        }
        for (std::size_t p = 1; p < dst.size(); ++p)
            EXPECT_TRUE(candidates.count(dst[static_cast<int>(p)].node->node_index));
        EXPECT_EQ(prune(t, kept, cfg), out);
    }
}

TEST(Prune, ReseedIsOptInAndGrowsTheSet) {
    auto t = oracle::tree_from_word("((((()))))(())");
    std::set<int> kept{3};
    auto literal = cfg_of(2, 1, 0, 3);
    auto reseed = literal;
    reseed.reseed = true;
    auto a = candidate_set(t, kept, literal);
    auto b = candidate_set(t, kept, reseed);
    EXPECT_EQ(a, (std::set<int>{1, 2, 3, 4, 5}));
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    EXPECT_GT(b.size(), a.size());
}

TEST(Serialize, SmallestButton) {
    auto t = detect_operable(parse_html("<button>OK</button>"));
    EXPECT_EQ(serialize_simplified(t).text, "<button id=\"0\">OK</button>");
}

TEST(Serialize, AnchorWithHref) {
    auto t = detect_operable(parse_html("<a href=\"https://x.example/a?b=1&amp;c=2\" class=big>Go</a>"));
    auto s = serialize_simplified(t);
    EXPECT_EQ(s.text, "<a id=\"0\" href=\"https://x.example/a?b=1&amp;c=2\">Go</a>");
    EXPECT_EQ(s.id_map, (std::map<int, int>{{0, 1}}));
}

TEST(Serialize, WhitelistVoidAndSkippedTags) {
    auto t = detect_operable(parse_html(
        "<div id=main style=x><input type=checkbox checked name=c data-q=1><img alt='a \"q\"' src=s>"
        "<script>x</script><p aria-label=L>1 &lt; 2</p></div>"));
    EXPECT_EQ(serialize_simplified(t).text,
              "<div><input id=\"0\" type=\"checkbox\" checked name=\"c\"><img alt=\"a &quot;q&quot;\">"
              "<p aria-label=\"L\">1 &lt; 2</p></div>");
}

TEST(Serialize, IdsAreConsistentAndDeterministic) {
    const std::string page = read(std::string(WEBNAV_TEST_DIR) + "/data/page.html");
    auto t = detect_operable(parse_html(page));
    auto a = simplify_page(t, PrunerConfig{});
    auto b = simplify_page(t, PrunerConfig{});
    EXPECT_EQ(a, b);
    std::regex id_re("id=\"([0-9]+)\"");
    std::set<int> seen_nodes;
    for (auto it = std::sregex_iterator(a.text.begin(), a.text.end(), id_re); it != std::sregex_iterator(); ++it) {
        int id = std::stoi((*it)[1]);
        ASSERT_TRUE(a.id_map.count(id)) << id;
    }
    for (const auto& [id, node] : a.id_map) EXPECT_TRUE(seen_nodes.insert(node).second);
    EXPECT_EQ(a.token_estimate, (a.text.size() + 3) / 4);
}

TEST(Serialize, TwentyNodeGolden) {
    const std::string page = read(std::string(WEBNAV_TEST_DIR) + "/data/page20.html");
    auto t = detect_operable(parse_html(page));
    ASSERT_EQ(node_count(t), 20u);
    auto s = simplify_page(t, PrunerConfig{});
    EXPECT_EQ(s.text + "\n", read(std::string(WEBNAV_TEST_DIR) + "/golden/simplified_page20.txt"));
}
