#include "webnav/errors.hpp"
#include "webnav/http.hpp"
#include "webnav/policy.hpp"

#include <json.hpp>

namespace webnav {

HttpPolicy::HttpPolicy(HttpPolicyOptions options) : options_(std::move(options)) {
    if (!split_endpoint(options_.endpoint))
        throw InvalidConfig("policy endpoint must be an absolute http(s) URL: " + options_.endpoint);
}

std::string HttpPolicy::complete(const std::string& prompt) {
    nlohmann::json body = {{"prompt", prompt}, {"max_tokens", options_.max_tokens}, {"stop", options_.stop}};
    HttpHeaders headers;
    if (!options_.auth_token.empty()) headers.emplace_back("Authorization", "Bearer " + options_.auth_token);
    HttpResponse res;
    try {
        res = http_request("POST", options_.endpoint, body.dump(), headers, options_.timeout);
    } catch (const Error& e) {
        throw PolicyError(e.detail());
    }
    if (res.status != 200)
        throw PolicyError("policy backend returned HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200));
    try {
        auto parsed = nlohmann::json::parse(res.body);
        return parsed.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw PolicyError(std::string("malformed policy response: ") + e.what());
    }
}

}  // namespace webnav
