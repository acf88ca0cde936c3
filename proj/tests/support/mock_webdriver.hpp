#pragma once

#include "webnav/dom.hpp"

#include <httplib.h>
#include <json.hpp>

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace testsupport {

// Just enough of a WebDriver server to drive BrowserEnvironment: it answers
// the library's own scripts by recognizing them and keeps the page as a
// parsed tree. Pages come from `fetch(url)`.
class MockWebDriver {
public:
    using Fetch = std::function<std::optional<std::string>(const std::string& url)>;

    explicit MockWebDriver(Fetch fetch);
    ~MockWebDriver();

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

    // Every session command as "METHOD /suffix".
    std::vector<std::string> commands() const;
    std::string url() const;
    double scroll_y() const;
    std::string value_of(const std::string& name) const;  // by the name attribute
    bool session_open() const;

    // The next session command answers with this error.
    void fail_next(int status, std::string error, std::string message);

private:
    struct Page {
        std::string url;
        webnav::DomTree tree;
        std::map<std::string, std::string> values;  // element path -> value
        double scroll_y = 0;
    };

    void route();
    nlohmann::json handle(const std::string& method, const std::string& suffix, const nlohmann::json& body);
    void navigate(const std::string& url, bool push = true);
    nlohmann::json snapshot() const;
    nlohmann::json node_json(const webnav::DomNode& n, const std::string& path) const;
    webnav::DomNode* resolve(const std::string& element, std::string* parent_form = nullptr);
    void submit(const std::string& form_path);
    std::string absolute(const std::string& href) const;

    Fetch fetch_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;

    mutable std::mutex mutex_;
    std::vector<std::string> log_;
    std::vector<Page> history_;
    std::size_t position_ = 0;
    bool session_ = false;
    std::optional<std::tuple<int, std::string, std::string>> failure_;
};

}  // namespace testsupport
