#include "mock_webdriver.hpp"

#include "fixture_site.hpp"
#include "webnav/text.hpp"

#include <chrono>

namespace testsupport {

using nlohmann::json;
using webnav::DomNode;

namespace {

constexpr const char* kElementKey = "element-6066-11e4-a52e-4f735466cecf";
constexpr const char* kEnter = "\xEE\x80\x87";

json element_ref(const std::string& path) { return {{kElementKey, path}}; }

std::vector<std::size_t> parse_path(const std::string& element) {
    if (element.rfind("p", 0) != 0) throw std::runtime_error("bad element reference " + element);
    std::vector<std::size_t> out;
    std::size_t pos = 1;
    while (pos < element.size()) {
        auto next = element.find('/', pos + 1);
        out.push_back(std::stoul(element.substr(pos + 1, next == std::string::npos ? next : next - pos - 1)));
        pos = next == std::string::npos ? element.size() : next;
    }
    return out;
}

std::string join_path(const std::vector<std::size_t>& path) {
    std::string out = "p";
    for (auto i : path) out += "/" + std::to_string(i);
    return out;
}

}  // namespace

MockWebDriver::MockWebDriver(Fetch fetch) : fetch_(std::move(fetch)) {
    navigate("about:blank");
    route();
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    for (int i = 0; i < 200 && !server_.is_running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
}

MockWebDriver::~MockWebDriver() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
}

std::vector<std::string> MockWebDriver::commands() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::string MockWebDriver::url() const {
    std::lock_guard lock(mutex_);
    return history_[position_].url;
}

double MockWebDriver::scroll_y() const {
    std::lock_guard lock(mutex_);
    return history_[position_].scroll_y;
}

bool MockWebDriver::session_open() const {
    std::lock_guard lock(mutex_);
    return session_;
}

std::string MockWebDriver::value_of(const std::string& name) const {
    std::lock_guard lock(mutex_);
    const Page& page = history_[position_];
    std::string found;
    std::function<void(const DomNode&, std::vector<std::size_t>&)> walk = [&](const DomNode& n, auto& path) {
        const std::string* attr = n.attribute("name");
        if (attr && *attr == name) {
            auto it = page.values.find(join_path(path));
            const std::string* v = n.attribute("value");
            found = it != page.values.end() ? it->second : (v ? *v : "");
        }
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            path.push_back(i);
            walk(n.children[i], path);
            path.pop_back();
        }
    };
    std::vector<std::size_t> path;
    walk(page.tree.root, path);
    return found;
}

void MockWebDriver::fail_next(int status, std::string error, std::string message) {
    std::lock_guard lock(mutex_);
    failure_ = std::make_tuple(status, std::move(error), std::move(message));
}

void MockWebDriver::route() {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        json body = req.body.empty() ? json::object() : json::parse(req.body, nullptr, false);
        std::string path = req.path;
        std::lock_guard lock(mutex_);
        std::string suffix;
        if (path.rfind("/session/s1", 0) == 0) suffix = path.substr(11);
        log_.push_back(req.method + " " + (path == "/session" ? path : suffix));
        if (failure_ && path != "/session") {
            auto [status, error, message] = *failure_;
            failure_.reset();
            res.status = status;
            res.set_content(json{{"value", {{"error", error}, {"message", message}}}}.dump(), "application/json");
            return;
        }
        try {
            json value;
            if (path == "/session" && req.method == "POST") {
                session_ = true;
                value = {{"sessionId", "s1"}, {"capabilities", json::object()}};
            } else if (path == "/session/s1" && req.method == "DELETE") {
                session_ = false;
            } else {
                value = handle(req.method, suffix, body);
            }
            res.set_content(json{{"value", value}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 404;
            res.set_content(json{{"value", {{"error", "no such element"}, {"message", e.what()}}}}.dump(),
                            "application/json");
        }
    };
    server_.Get(R"(/session.*)", handler);
    server_.Post(R"(/session.*)", handler);
    server_.Delete(R"(/session.*)", handler);
}

json MockWebDriver::handle(const std::string& method, const std::string& suffix, const json& body) {
    Page& page = history_[position_];
    if (suffix == "/url" && method == "POST") {
        navigate(body.at("url").get<std::string>());
        return nullptr;
    }
    if (suffix == "/url") return page.url;
    if (suffix == "/title") return page.tree.title.value_or("");
    if (suffix == "/window" && method == "GET") return "main";
    if (suffix == "/window/handles") return json::array({"main"});
    if (suffix == "/window") return nullptr;
    if (suffix == "/back") {
        if (position_ > 0) --position_;
        return nullptr;
    }
    if (suffix == "/forward") {
        if (position_ + 1 < history_.size()) ++position_;
        return nullptr;
    }
    if (suffix == "/actions") return nullptr;
    if (suffix == "/execute/sync") {
        std::string script = body.at("script").get<std::string>();
        const json& args = body.at("args");
        if (script.find("document.readyState") != std::string::npos) return "complete";
        if (script.find("function walk(el)") != std::string::npos) return snapshot();
        if (script.find("window.scrollBy") != std::string::npos) {
            page.scroll_y = std::clamp(page.scroll_y + args.at(0).get<double>() * 800.0, 0.0, 1600.0);
            return nullptr;
        }
        if (script.find("querySelectorAll('option')") != std::string::npos) {
            std::string base = args.at(0).at(kElementKey).get<std::string>();
            std::string want = webnav::normalize_for_match(args.at(1).get<std::string>());
            DomNode* select = resolve(base);
            for (std::size_t i = 0; i < select->children.size(); ++i) {
                const DomNode& o = select->children[i];
                const std::string* v = o.attribute("value");
                if (o.tag == "option" &&
                    ((v && webnav::normalize_for_match(*v) == want) || webnav::normalize_for_match(o.text) == want))
                    return element_ref(base + "/" + std::to_string(i));
            }
            return nullptr;
        }
        if (script.find("document.documentElement;\nfor") != std::string::npos) {
            std::vector<std::size_t> path = args.at(0).get<std::vector<std::size_t>>();
            std::string element = join_path(path);
            try {
                resolve(element);
            } catch (const std::exception&) {
                return nullptr;
            }
            return element_ref(element);
        }
        throw std::runtime_error("unexpected script");
    }
    if (suffix.rfind("/element/", 0) == 0) {
        auto rest = suffix.substr(9);
        auto verb_at = rest.rfind('/');
        std::string element = rest.substr(0, verb_at);
        std::string verb = rest.substr(verb_at + 1);
        std::string form;
        DomNode* node = resolve(element, &form);
        if (verb == "clear") {
            page.values[element] = "";
        } else if (verb == "value") {
            std::string text = body.at("text").get<std::string>();
            bool enter = false;
            if (auto at = text.find(kEnter); at != std::string::npos) {
                text.erase(at);
                enter = true;
            }
            page.values[element] += text;
            if (enter && !form.empty()) submit(form);
        } else if (verb == "click") {
            const std::string* href = node->attribute("href");
            const std::string* type = node->attribute("type");
            if (node->tag == "a" && href) {
                navigate(absolute(*href));
            } else if (node->tag == "option") {
                auto parent = element.substr(0, element.rfind('/'));
                const std::string* v = node->attribute("value");
                page.values[parent] = v ? *v : node->text;
            } else if ((node->tag == "button" && (!type || *type == "submit")) ||
                       (node->tag == "input" && type && *type == "submit")) {
                if (!form.empty()) submit(form);
            }
        }
        return nullptr;
    }
    throw std::runtime_error("unknown command " + method + " " + suffix);
}

void MockWebDriver::navigate(const std::string& url, bool push) {
    Page page;
    page.url = url;
    std::optional<std::string> html;
    if (url == "about:blank")
        html = "<html><head></head><body></body></html>";
    else
        html = fetch_(url);
    page.tree = webnav::parse_html(html.value_or("<html><head><title>Not found</title></head><body><h1>404</h1></body></html>"));
    if (push) {
        if (!history_.empty()) history_.resize(position_ + 1);
        history_.push_back(std::move(page));
        position_ = history_.size() - 1;
    } else {
        history_[position_] = std::move(page);
    }
}

json MockWebDriver::node_json(const DomNode& n, const std::string& path) const {
    const Page& page = history_[position_];
    json attrs = json::array();
    auto value = page.values.find(path);
    bool has_value = false;
    for (const auto& [k, v] : n.attributes) {
        if (k == "value" && value != page.values.end()) {
            attrs.push_back({k, value->second});
            has_value = true;
        } else {
            attrs.push_back({k, v});
        }
    }
    if (!has_value && value != page.values.end() && !value->second.empty()) attrs.push_back({"value", value->second});
    json children = json::array();
    for (std::size_t i = 0; i < n.children.size(); ++i)
        children.push_back(node_json(n.children[i], path + "/" + std::to_string(i)));
    return {{"tag", n.tag},        {"attrs", attrs},  {"text", n.text},
            {"rect", {0, 0, 100, 20}}, {"visible", true}, {"children", children}};
}

json MockWebDriver::snapshot() const {
    const Page& page = history_[position_];
    return {{"url", page.url},
            {"title", page.tree.title.value_or("")},
            {"scroll_y", page.scroll_y},
            {"viewport_height", 800},
            {"page_height", 2400},
            {"root", node_json(page.tree.root, "p")}};
}

DomNode* MockWebDriver::resolve(const std::string& element, std::string* parent_form) {
    DomNode* node = &history_[position_].tree.root;
    std::vector<std::size_t> walked;
    for (auto i : parse_path(element)) {
        if (parent_form && node->tag == "form") *parent_form = join_path(walked);
        if (i >= node->children.size()) throw std::runtime_error("stale element " + element);
        node = &node->children[i];
        walked.push_back(i);
    }
    return node;
}

void MockWebDriver::submit(const std::string& form_path) {
    Page& page = history_[position_];
    DomNode* form = resolve(form_path);
    std::string query;
    std::function<void(const DomNode&, const std::string&)> collect = [&](const DomNode& n, const std::string& path) {
        const std::string* name = n.attribute("name");
        if (name && (n.tag == "input" || n.tag == "select" || n.tag == "textarea")) {
            auto it = page.values.find(path);
            const std::string* v = n.attribute("value");
            std::string value = it != page.values.end() ? it->second : (v ? *v : "");
            query += (query.empty() ? "" : "&") + url_encode(*name) + "=" + url_encode(value);
        }
        for (std::size_t i = 0; i < n.children.size(); ++i) collect(n.children[i], path + "/" + std::to_string(i));
    };
    collect(*form, form_path);
    const std::string* action = form->attribute("action");
    std::string target = absolute(action ? *action : page.url.substr(0, page.url.find('?')));
    navigate(target + "?" + query);
}

std::string MockWebDriver::absolute(const std::string& href) const {
    if (href.rfind("http", 0) == 0) return href;
    const std::string& base = history_[position_].url;
    auto scheme = base.find("://");
    auto slash = scheme == std::string::npos ? std::string::npos : base.find('/', scheme + 3);
    return base.substr(0, slash) + href;
}

}  // namespace testsupport
