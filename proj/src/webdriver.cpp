#include "webnav/webdriver.hpp"
#include "webnav/errors.hpp"
#include "webnav/http.hpp"
#include "webnav/text.hpp"

#include <thread>

namespace webnav {

using nlohmann::json;

namespace {

constexpr const char* kElementKey = "element-6066-11e4-a52e-4f735466cecf";

constexpr const char* kSnapshotScript = R"JS(
const noText = new Set(['script', 'style', 'noscript', 'template']);
function walk(el) {
  const tag = el.tagName.toLowerCase();
  const attrs = [];
  for (const a of el.attributes) attrs.push([a.name, a.value]);
  if ((tag === 'input' || tag === 'select') && typeof el.value === 'string') {
    const i = attrs.findIndex(a => a[0] === 'value');
    if (i >= 0) attrs[i][1] = el.value; else if (el.value !== '') attrs.push(['value', el.value]);
  }
  let text = '';
  if (tag === 'textarea') text = el.value;
  else if (!noText.has(tag)) for (const c of el.childNodes) if (c.nodeType === 3) text += ' ' + c.nodeValue;
  const r = el.getBoundingClientRect();
  const cs = window.getComputedStyle(el);
  const visible = cs.display !== 'none' && cs.visibility !== 'hidden' && el.getClientRects().length > 0;
  const children = [];
  for (const c of el.children) children.push(walk(c));
  return {tag, attrs, text, rect: [r.x, r.y + window.scrollY, r.width, r.height], visible, children};
}
const de = document.documentElement;
return {
  url: location.href,
  title: document.title,
  scroll_y: window.scrollY,
  viewport_height: window.innerHeight,
  page_height: Math.max(de.scrollHeight, document.body ? document.body.scrollHeight : 0, window.innerHeight),
  root: walk(de)
};
)JS";

constexpr const char* kLocateScript = R"JS(
let el = document.documentElement;
for (const i of arguments[0]) { if (!el) break; el = el.children[i]; }
return el || null;
)JS";

constexpr const char* kOptionScript = R"JS(
const norm = s => (s || '').replace(/\s+/g, ' ').trim().toLowerCase();
const want = norm(arguments[1]);
for (const o of arguments[0].querySelectorAll('option'))
  if (norm(o.value) === want || norm(o.textContent) === want) return o;
return null;
)JS";

DomNode node_from_json(const json& j, int depth) {
    if (!j.is_object()) throw EnvironmentError("malformed page snapshot");
    if (depth > 512) throw EnvironmentError("page snapshot nests too deeply");
    DomNode n;
    n.tag = ascii_lower(j.value("tag", std::string("div")));
    if (auto it = j.find("attrs"); it != j.end() && it->is_array())
        for (const auto& a : *it)
            if (a.is_array() && a.size() == 2 && a[0].is_string() && a[1].is_string()) {
                auto name = ascii_lower(a[0].get<std::string>());
                if (!n.has_attribute(name)) n.attributes.emplace_back(name, a[1].get<std::string>());
            }
    if (auto it = j.find("text"); it != j.end() && it->is_string()) n.text = normalize_whitespace(it->get<std::string>());
    if (auto it = j.find("rect"); it != j.end() && it->is_array() && it->size() == 4)
        n.bounds = Rect{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(), (*it)[3].get<double>()};
    if (auto it = j.find("visible"); it != j.end() && it->is_boolean()) n.visible = it->get<bool>();
    if (auto it = j.find("children"); it != j.end() && it->is_array())
        for (const auto& c : *it) n.children.push_back(node_from_json(c, depth + 1));
    return n;
}

}  // namespace

DomTree dom_tree_from_snapshot(const json& root) {
    DomTree tree;
    tree.root = node_from_json(root, 0);
    renumber(tree);
    return detect_operable(std::move(tree));
}

WebDriverSession::WebDriverSession(WebDriverOptions options) : options_(std::move(options)) {
    while (!options_.endpoint.empty() && options_.endpoint.back() == '/') options_.endpoint.pop_back();
    if (!split_endpoint(options_.endpoint))
        throw InvalidConfig("browser endpoint must be an absolute http(s) URL: " + options_.endpoint);
    json body = {{"capabilities", {{"alwaysMatch", options_.capabilities}}}};
    json value = raw("POST", options_.endpoint + "/session", &body);
    if (!value.is_object() || !value.contains("sessionId") || !value["sessionId"].is_string())
        throw EnvironmentError("new session response carries no sessionId");
    session_id_ = value["sessionId"].get<std::string>();
}

WebDriverSession::~WebDriverSession() {
    try {
        raw("DELETE", options_.endpoint + "/session/" + session_id_, nullptr);
    } catch (const std::exception&) {
    }
}

json WebDriverSession::raw(const std::string& method, const std::string& url, const json* body) {
    HttpHeaders headers{{"Accept", "application/json"}};
    auto res = http_request(method, url, body ? body->dump() : std::string(), headers, options_.request_timeout);
    json parsed;
    try {
        parsed = json::parse(res.body);
    } catch (const json::parse_error&) {
        throw EnvironmentError(method + " " + url + " returned HTTP " + std::to_string(res.status) +
                               " with a non-JSON body");
    }
    json value = parsed.is_object() && parsed.contains("value") ? parsed["value"] : json();
    if (res.status != 200) {
        std::string error = value.is_object() ? value.value("error", std::string("unknown error")) : "unknown error";
        std::string message = value.is_object() ? value.value("message", std::string()) : std::string();
        throw EnvironmentError("HTTP " + std::to_string(res.status) + " " + error +
                               (message.empty() ? "" : ": " + message));
    }
    return value;
}

json WebDriverSession::command(const std::string& method, const std::string& path, const json& body) {
    std::string url = options_.endpoint + "/session/" + session_id_ + path;
    return raw(method, url, method == "POST" ? &body : nullptr);
}

json WebDriverSession::execute(const std::string& script, const json& args) {
    return command("POST", "/execute/sync", {{"script", script}, {"args", args}});
}

BrowserEnvironment::BrowserEnvironment(std::shared_ptr<WebDriverSession> session, std::string start_url)
    : session_(std::move(session)), start_url_(std::move(start_url)) {
    if (!session_) throw InvalidConfig("browser environment needs a session");
}

void BrowserEnvironment::settle() {
    using clock = std::chrono::steady_clock;
    auto deadline = clock::now() + session_->options().load_timeout;
    while (clock::now() < deadline) {
        auto state = session_->execute("return document.readyState;");
        if (state.is_string() && state.get<std::string>() == "complete") break;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    std::this_thread::sleep_for(session_->options().quiescence);
}

json BrowserEnvironment::element_at(int node_index) {
    auto path = child_path(last_tree_, node_index);
    if (!path) throw EnvironmentError("node " + std::to_string(node_index) + " is not in the latest snapshot");
    json ref = session_->execute(kLocateScript, json::array({*path}));
    if (!ref.is_object() || !ref.contains(kElementKey))
        throw EnvironmentError("element for node " + std::to_string(node_index) + " is gone from the page");
    return ref;
}

PageState BrowserEnvironment::reset(const std::string&) {
    if (!start_url_.empty()) {
        session_->command("POST", "/url", {{"url", start_url_}});
        settle();
    }
    return snapshot();
}

PageState BrowserEnvironment::snapshot() {
    json snap = session_->execute(kSnapshotScript);
    if (!snap.is_object() || !snap.contains("root")) throw EnvironmentError("page snapshot script returned no tree");

    PageState state;
    state.tree = dom_tree_from_snapshot(snap["root"]);
    state.url = snap.value("url", std::string());
    state.tree.source_url = state.url;
    if (auto title = snap.value("title", std::string()); !title.empty()) state.tree.title = title;
    state.scroll_y = snap.value("scroll_y", 0.0);
    state.viewport_height = snap.value("viewport_height", 0.0);
    state.page_height = snap.value("page_height", 0.0);

    auto current = session_->command("GET", "/window").get<std::string>();
    auto handles = session_->command("GET", "/window/handles");
    for (const auto& h : handles) {
        auto handle = h.get<std::string>();
        Tab tab;
        tab.is_current = handle == current;
        if (tab.is_current) {
            tab.title = state.tree.title.value_or("");
            tab.url = state.url;
        } else {
            session_->command("POST", "/window", {{"handle", handle}});
            tab.title = session_->command("GET", "/title").get<std::string>();
            tab.url = session_->command("GET", "/url").get<std::string>();
        }
        state.tabs.push_back(std::move(tab));
    }
    if (handles.size() > 1) session_->command("POST", "/window", {{"handle", current}});

    last_tree_ = state.tree;
    return state;
}

PageState BrowserEnvironment::apply(const Action& action, const std::map<int, int>& id_map) {
    auto node_of = [&](const std::string& element_id) {
        auto it = id_map.find(std::stoi(element_id));
        if (it == id_map.end()) throw EnvironmentError("unknown element id " + element_id);
        return it->second;
    };
    auto element_id = [](const json& ref) { return ref[kElementKey].get<std::string>(); };

    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, cmd::Click>) {
                auto ref = element_at(node_of(c.element_id));
                session_->command("POST", "/element/" + element_id(ref) + "/click");
                settle();
            } else if constexpr (std::is_same_v<T, cmd::Hover>) {
                auto ref = element_at(node_of(c.element_id));
                json move = {{"type", "pointerMove"}, {"duration", 0}, {"origin", ref}, {"x", 0}, {"y", 0}};
                json actions = {{"actions",
                                 {{{"type", "pointer"},
                                   {"id", "mouse"},
                                   {"parameters", {{"pointerType", "mouse"}}},
                                   {"actions", {move}}}}}};
                session_->command("POST", "/actions", actions);
            } else if constexpr (std::is_same_v<T, cmd::Select>) {
                auto ref = element_at(node_of(c.element_id));
                auto option = session_->execute(kOptionScript, json::array({ref, c.option}));
                if (!option.is_object() || !option.contains(kElementKey))
                    throw EnvironmentError("option '" + c.option + "' not found");
                session_->command("POST", "/element/" + element_id(option) + "/click");
                settle();
            } else if constexpr (std::is_same_v<T, cmd::TypeString>) {
                auto id = element_id(element_at(node_of(c.element_id)));
                session_->command("POST", "/element/" + id + "/clear");
                std::string text = c.content;
                if (c.press_enter) text += "\xEE\x80\x87";  // U+E007, the Enter key
                session_->command("POST", "/element/" + id + "/value", {{"text", text}});
                if (c.press_enter) settle();
            } else if constexpr (std::is_same_v<T, cmd::ScrollPage>) {
                int sign = c.direction == ScrollDirection::Down ? 1 : -1;
                session_->execute("window.scrollBy(0, arguments[0] * window.innerHeight);", json::array({sign}));
            } else if constexpr (std::is_same_v<T, cmd::Go>) {
                session_->command("POST", c.direction == GoDirection::Backward ? "/back" : "/forward");
                settle();
            } else if constexpr (std::is_same_v<T, cmd::JumpTo>) {
                if (c.new_tab) {
                    auto created = session_->command("POST", "/window/new", {{"type", "tab"}});
                    session_->command("POST", "/window", {{"handle", created.at("handle")}});
                }
                session_->command("POST", "/url", {{"url", c.url}});
                settle();
            } else if constexpr (std::is_same_v<T, cmd::SwitchTab>) {
                auto handles = session_->command("GET", "/window/handles");
                if (c.tab_index < 0 || c.tab_index >= static_cast<std::int64_t>(handles.size()))
                    throw EnvironmentError("no tab " + std::to_string(c.tab_index));
                session_->command("POST", "/window", {{"handle", handles[static_cast<std::size_t>(c.tab_index)]}});
                settle();
            }
            // user_input is answered by the episode loop; finish is a no-op.
        },
        action.command);
    return snapshot();
}

}  // namespace webnav
