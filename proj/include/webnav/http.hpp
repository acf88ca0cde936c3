#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace webnav {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // base path without trailing slash, may be empty
};

// Splits an absolute http(s) URL. Returns nullopt for anything else.
std::optional<Endpoint> split_endpoint(const std::string& url);

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
    int status = 0;
    std::string body;
};

// One blocking request with a JSON body. Transport failures throw
// EnvironmentError; any HTTP status is returned as is.
HttpResponse http_request(const std::string& method, const std::string& url, const std::string& body,
                          const HttpHeaders& headers, std::chrono::milliseconds timeout);

}  // namespace webnav
