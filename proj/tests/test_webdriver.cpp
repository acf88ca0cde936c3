#include "support/fixture_site.hpp"
#include "support/mock_webdriver.hpp"
#include "support/policies.hpp"

#include "webnav/episode.hpp"
#include "webnav/errors.hpp"
#include "webnav/webdriver.hpp"

#include <gtest/gtest.h>

using namespace webnav;
using namespace testsupport;

namespace {

constexpr const char* kOrigin = "http://fixture.test";

std::optional<std::string> fetch(const std::string& url) {
    if (url.rfind(kOrigin, 0) != 0) return std::nullopt;
    std::string target = url.substr(std::string(kOrigin).size());
    if (target == "/form")
        return R"(<html><head><title>Form</title></head><body>
<select name="size"><option value="s">Small</option><option value="l">Large</option></select>
<a href="/">Home</a></body></html>)";
    return fixture_page(target);
}

std::shared_ptr<WebDriverSession> open(const MockWebDriver& mock) {
    WebDriverOptions o;
    o.endpoint = mock.endpoint();
    o.quiescence = std::chrono::milliseconds(0);
    o.request_timeout = std::chrono::milliseconds(5000);
    return std::make_shared<WebDriverSession>(o);
}

bool has_text(const DomTree& tree, const std::string& text) {
    bool found = false;
    for_each_preorder(tree.root, [&](const DomNode& n) { found = found || n.text == text; });
    return found;
}

int id_with(const PageState& state, const std::string& attr, const std::string& value) {
    int id = -1;
    for_each_preorder(state.tree.root, [&](const DomNode& n) {
        const std::string* a = n.attribute(attr);
        if (a && *a == value && n.operable_id) id = *n.operable_id;
    });
    return id;
}

}  // namespace

TEST(WebDriver, SessionLifecycle) {
    MockWebDriver mock(fetch);
    {
        auto session = open(mock);
        EXPECT_EQ(session->id(), "s1");
        EXPECT_TRUE(mock.session_open());
    }
    EXPECT_FALSE(mock.session_open());
    EXPECT_EQ(mock.commands().back(), "DELETE ");
}

TEST(WebDriver, ResetLoadsStartPage) {
    MockWebDriver mock(fetch);
    BrowserEnvironment env(open(mock), std::string(kOrigin) + "/");
    PageState s = env.reset("t");
    EXPECT_EQ(s.url, "http://fixture.test/");
    EXPECT_EQ(s.tree.title, std::optional<std::string>("Fixture library"));
    ASSERT_EQ(s.tabs.size(), 1u);
    EXPECT_TRUE(s.tabs[0].is_current);
    EXPECT_EQ(s.viewport_height, 800);
    EXPECT_EQ(s.page_height, 2400);
    EXPECT_GE(id_with(s, "placeholder", "Book title"), 0);
    EXPECT_NO_THROW(check_page_state(s));
}

TEST(WebDriver, ActionsReachTheWire) {
    MockWebDriver mock(fetch);
    BrowserEnvironment env(open(mock), std::string(kOrigin) + "/");
    PageState s = env.reset("t");
    auto view = simplify_page(s.tree, {});
    int box = id_with(s, "placeholder", "Book title");

    s = env.apply(Action{cmd::TypeString{std::to_string(box), "dune", false}, std::nullopt}, view.id_map);
    EXPECT_EQ(mock.value_of("q"), "dune");
    EXPECT_EQ(id_with(s, "value", "dune"), box);
    auto log = mock.commands();
    bool cleared = false, typed = false;
    for (const auto& c : log) {
        cleared = cleared || c.find("/clear") != std::string::npos;
        typed = typed || c.find("/value") != std::string::npos;
    }
    EXPECT_TRUE(cleared && typed);

    view = simplify_page(s.tree, {});
    s = env.apply(Action{cmd::ScrollPage{ScrollDirection::Down}, std::nullopt}, view.id_map);
    EXPECT_EQ(mock.scroll_y(), 800);
    EXPECT_EQ(s.scroll_y, 800);

    s = env.apply(Action{cmd::JumpTo{std::string(kOrigin) + "/form", false}, std::nullopt}, view.id_map);
    EXPECT_EQ(mock.url(), "http://fixture.test/form");
    EXPECT_EQ(s.url, mock.url());

    view = simplify_page(s.tree, {});
    int select = id_with(s, "name", "size");
    s = env.apply(Action{cmd::Select{std::to_string(select), "Large"}, std::nullopt}, view.id_map);
    EXPECT_EQ(mock.value_of("size"), "l");

    s = env.apply(Action{cmd::Go{GoDirection::Backward}, std::nullopt}, view.id_map);
    EXPECT_EQ(s.url, "http://fixture.test/");

    view = simplify_page(s.tree, {});
    EXPECT_THROW(env.apply(Action{cmd::Click{"99"}, std::nullopt}, view.id_map), EnvironmentError);
}

TEST(WebDriver, PressEnterSubmits) {
    MockWebDriver mock(fetch);
    BrowserEnvironment env(open(mock), std::string(kOrigin) + "/");
    PageState s = env.reset("t");
    auto view = simplify_page(s.tree, {});
    int box = id_with(s, "placeholder", "Book title");
    s = env.apply(Action{cmd::TypeString{std::to_string(box), "the hobbit", true}, std::nullopt}, view.id_map);
    EXPECT_EQ(s.url, "http://fixture.test/result?q=the+hobbit");
    EXPECT_TRUE(has_text(s.tree, "Results for the hobbit"));
}

TEST(WebDriver, ErrorStatusBecomesEnvironmentError) {
    MockWebDriver mock(fetch);
    auto session = open(mock);
    mock.fail_next(404, "no such window", "window was closed");
    try {
        session->command("GET", "/url");
        FAIL();
    } catch (const EnvironmentError& e) {
        EXPECT_NE(std::string(e.what()).find("HTTP 404 no such window: window was closed"), std::string::npos);
    }
    EXPECT_EQ(session->command("GET", "/url"), "about:blank");

    WebDriverOptions none;
    none.endpoint = "http://127.0.0.1:9";
    none.request_timeout = std::chrono::milliseconds(2000);
    EXPECT_THROW(WebDriverSession{none}, EnvironmentError);
    none.endpoint = "127.0.0.1:4444";
    EXPECT_THROW(WebDriverSession{none}, InvalidConfig);
}

TEST(WebDriver, ScriptedEpisode) {
    MockWebDriver mock(fetch);
    BrowserEnvironment env(open(mock), "");
    StepPolicy policy({
        say("jump_to(url=\"http://fixture.test/\", new_tab=False)"),
        [](const std::string& p) {
            return "type_string(element_id=\"" + id_of(p, "placeholder=\"Book title\"") +
                   "\", content=\"dune\", press_enter=False)";
        },
        [](const std::string& p) { return "click(element_id=\"" + id_of(p, ">Search<") + "\")"; },
        say("finish(answer=\"Results for dune\")"),
    });
    EpisodeOptions o;
    o.site = "fixture.test";
    Trace t = run_episode(env, policy, "Search the library for dune", o);
    ASSERT_EQ(t.steps.size(), 4u) << t.outcome.detail;
    EXPECT_EQ(t.outcome, Outcome::finished("Results for dune"));
    EXPECT_EQ(mock.url(), "http://fixture.test/result?q=dune");
    EXPECT_TRUE(has_text(env.snapshot().tree, fixture_result_text("dune")));
    EXPECT_NO_THROW(check_trace(t));
    EXPECT_EQ(trace_from_json_line(trace_to_json_line(t)), t);
}

TEST(WebDriver, TreeFromSnapshot) {
    auto j = nlohmann::json::parse(R"({"tag": "HTML", "attrs": [], "text": "", "children": [
        {"tag": "body", "attrs": [], "text": "", "visible": true, "children": [
            {"tag": "button", "attrs": [["Class", "x"], ["class", "dup"]], "text": "  Buy\n now ",
             "rect": [1, 2, 3, 4], "visible": true, "children": []},
            {"tag": "a", "attrs": [["href", "/h"]], "text": "hidden", "visible": false, "children": []}]}]})");
    DomTree tree = dom_tree_from_snapshot(j);
    EXPECT_EQ(tree.root.tag, "html");
    const DomNode& button = tree.root.children[0].children[0];
    EXPECT_EQ(button.text, "Buy now");
    EXPECT_EQ(button.attributes, (std::vector<Attribute>{{"class", "x"}}));
    EXPECT_EQ(button.bounds, (Rect{1, 2, 3, 4}));
    EXPECT_EQ(button.node_index, 2);
    EXPECT_TRUE(button.operable_id.has_value());
    const DomNode& link = tree.root.children[0].children[1];
    EXPECT_EQ(link.visible, std::optional<bool>(false));
    EXPECT_EQ(kept_set(tree).count(link.node_index), 0u);
    EXPECT_THROW(dom_tree_from_snapshot(nlohmann::json::array()), EnvironmentError);
}
