#pragma once

#include "webnav/environment.hpp"

#include <json.hpp>

#include <chrono>
#include <memory>
#include <string>
#include <vector>

namespace webnav {

struct WebDriverOptions {
    std::string endpoint;  // e.g. http://127.0.0.1:4444
    nlohmann::json capabilities = nlohmann::json::object();
    std::chrono::milliseconds quiescence{500};
    std::chrono::milliseconds load_timeout{15000};
    std::chrono::milliseconds request_timeout{30000};
};

// One browser session, deleted on destruction. Protocol failures throw
// EnvironmentError carrying the wire status and error code.
class WebDriverSession {
public:
    explicit WebDriverSession(WebDriverOptions options);
    ~WebDriverSession();
    WebDriverSession(const WebDriverSession&) = delete;
    WebDriverSession& operator=(const WebDriverSession&) = delete;

    const std::string& id() const { return session_id_; }
    const WebDriverOptions& options() const { return options_; }

    // `path` is relative to the session, e.g. "/url". Returns `value`.
    nlohmann::json command(const std::string& method, const std::string& path,
                           const nlohmann::json& body = nlohmann::json::object());

    nlohmann::json execute(const std::string& script, const nlohmann::json& args = nlohmann::json::array());

private:
    nlohmann::json raw(const std::string& method, const std::string& url, const nlohmann::json* body);

    WebDriverOptions options_;
    std::string session_id_;
};

// Builds a tree from the JSON the in-page snapshot script returns.
DomTree dom_tree_from_snapshot(const nlohmann::json& root);

// Drives a real browser. Elements are located by the child-index path of
// their node in the latest snapshot, resolved again for every action.
class BrowserEnvironment : public Environment {
public:
    BrowserEnvironment(std::shared_ptr<WebDriverSession> session, std::string start_url);

    PageState reset(const std::string& task) override;
    PageState apply(const Action& action, const std::map<int, int>& id_map) override;
    PageState snapshot() override;

private:
    nlohmann::json element_at(int node_index);
    void settle();

    std::shared_ptr<WebDriverSession> session_;
    std::string start_url_;
    DomTree last_tree_;
};

}  // namespace webnav
